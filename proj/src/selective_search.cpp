#include "autobox/selective_search.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "autobox/error.hpp"

namespace autobox {

double similarity(const Segment& a, const Segment& b, long long image_area,
                  const SimilarityWeights& weights) noexcept {
    const double area = static_cast<double>(image_area);
    const double joint = static_cast<double>(a.pixel_count + b.pixel_count);
    double s = 0.0;
    if (weights.color) s += histogram_intersection(a.color, b.color);
    if (weights.texture) s += histogram_intersection(a.texture, b.texture);
    if (weights.size) s += 1.0 - joint / area;
    if (weights.fill) {
        const double hull = static_cast<double>(union_box(a.bbox, b.bbox).area());
        s += 1.0 - (hull - joint) / area;
    }
    return s;
}

Segment merge_segments(const Segment& a, const Segment& b, int new_id) noexcept {
    Segment m;
    m.id = new_id;
    m.pixel_count = a.pixel_count + b.pixel_count;
    m.bbox = union_box(a.bbox, b.bbox);
    const double wa = static_cast<double>(a.pixel_count) / m.pixel_count;
    const double wb = static_cast<double>(b.pixel_count) / m.pixel_count;
    for (std::size_t i = 0; i < m.color.size(); ++i) m.color[i] = wa * a.color[i] + wb * b.color[i];
    for (std::size_t i = 0; i < m.texture.size(); ++i) m.texture[i] = wa * a.texture[i] + wb * b.texture[i];
    return m;
}

std::vector<Segment> describe_segments(const RasterImage& img, const Segmentation& seg) {
    const PixelBins bins = compute_pixel_bins(img);
    std::vector<HistogramAccumulator> acc(seg.count);
    std::vector<int> x0(seg.count, seg.width), y0(seg.count, seg.height), x1(seg.count, -1), y1(seg.count, -1);
    for (int y = 0; y < seg.height; ++y) {
        for (int x = 0; x < seg.width; ++x) {
            const int l = seg.at(x, y);
            acc[l].add(bins, static_cast<std::size_t>(y) * seg.width + x);
            x0[l] = std::min(x0[l], x);
            y0[l] = std::min(y0[l], y);
            x1[l] = std::max(x1[l], x);
            y1[l] = std::max(y1[l], y);
        }
    }
    std::vector<Segment> out(seg.count);
    for (int l = 0; l < seg.count; ++l) {
        out[l].id = l;
        out[l].pixel_count = acc[l].pixels;
        out[l].bbox = {x0[l], y0[l], x1[l] - x0[l] + 1, y1[l] - y0[l] + 1};
        out[l].color = acc[l].color_hist();
        out[l].texture = acc[l].texture_hist();
    }
    return out;
}

std::vector<std::pair<int, int>> segment_adjacency(const Segmentation& seg) {
    std::set<std::pair<int, int>> pairs;
    auto link = [&](int a, int b) {
        if (a != b) pairs.emplace(std::min(a, b), std::max(a, b));
    };
    for (int y = 0; y < seg.height; ++y) {
        for (int x = 0; x < seg.width; ++x) {
            if (x + 1 < seg.width) link(seg.at(x, y), seg.at(x + 1, y));
            if (y + 1 < seg.height) link(seg.at(x, y), seg.at(x, y + 1));
        }
    }
    return {pairs.begin(), pairs.end()};
}

namespace {

struct Candidate {
    double sim;
    int a;
    int b;

    // Highest similarity first, then smallest (a, b).
    bool operator<(const Candidate& o) const noexcept {
        if (sim != o.sim) return sim > o.sim;
        if (a != o.a) return a < o.a;
        return b < o.b;
    }
};

} // namespace

Hierarchy group_segments(std::vector<Segment> initial,
                         const std::vector<std::pair<int, int>>& adjacency,
                         long long image_area, const SimilarityWeights& weights) {
    Hierarchy h;
    h.initial_count = static_cast<int>(initial.size());
    h.regions = std::move(initial);
    for (int i = 0; i < h.initial_count; ++i) h.regions[i].id = i;

    std::vector<std::set<int>> neighbours(h.regions.size());
    std::set<Candidate> queue;
    std::map<std::pair<int, int>, double> pair_sim;
    auto enqueue = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        const double s = similarity(h.regions[a], h.regions[b], image_area, weights);
        pair_sim[{a, b}] = s;
        queue.insert({s, a, b});
    };
    auto dequeue = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        const auto it = pair_sim.find({a, b});
        if (it == pair_sim.end()) return;
        queue.erase({it->second, a, b});
        pair_sim.erase(it);
    };

    for (const auto& [a, b] : adjacency) {
        if (a == b) continue;
        if (neighbours[a].insert(b).second) {
            neighbours[b].insert(a);
            enqueue(a, b);
        }
    }

    while (!queue.empty()) {
        const Candidate best = *queue.begin();
        const int t = static_cast<int>(h.regions.size());
        h.regions.push_back(merge_segments(h.regions[best.a], h.regions[best.b], t));
        h.merges.emplace_back(best.a, best.b);
        neighbours.emplace_back();

        std::set<int> joined;
        for (const int src : {best.a, best.b}) {
            for (const int k : neighbours[src]) {
                dequeue(src, k);
                if (k != best.a && k != best.b) {
                    neighbours[k].erase(src);
                    joined.insert(k);
                }
            }
            neighbours[src].clear();
        }
        for (const int k : joined) {
            neighbours[t].insert(k);
            neighbours[k].insert(t);
            enqueue(k, t);
        }
    }
    return h;
}

ProposalSet propose(const RasterImage& img, const ProposalConfig& config) {
    const Segmentation seg = oversegment(img, config.segmentation);
    const Hierarchy h = group_segments(describe_segments(img, seg), segment_adjacency(seg),
                                       img.area(), config.weights);
    ProposalSet rp;
    std::set<Box> seen;
    for (const auto& r : h.regions) {
        if (seen.insert(r.bbox).second) rp.push_back(r.bbox);
    }
    return rp;
}

void write_proposals_jsonl(const ProposalSet& rp, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    for (const auto& b : rp) {
        nlohmann::ordered_json j;
        j["xmin"] = b.xmin;
        j["ymin"] = b.ymin;
        j["width"] = b.width;
        j["height"] = b.height;
        out << j.dump() << '\n';
    }
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

ProposalSet read_proposals_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    ProposalSet rp;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            rp.push_back({j.at("xmin").get<int>(), j.at("ymin").get<int>(), j.at("width").get<int>(),
                          j.at("height").get<int>()});
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError,
                        path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rp;
}

} // namespace autobox
