#include "autobox/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "autobox/error.hpp"

namespace autobox {

MatchResult match_detections(std::span<const Detection> preds, std::span<const Annotation> gts,
                             double iou_threshold) {
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0))
        throw Error(ErrorCode::InvalidArgument, "matching IoU threshold must lie in (0, 1)");

    std::map<std::string, std::size_t> by_file;
    for (std::size_t i = 0; i < gts.size(); ++i) {
        if (!by_file.emplace(gts[i].image_filename, i).second)
            throw Error(ErrorCode::InvalidArgument, "ground truth lists " + gts[i].image_filename + " twice");
    }

    MatchResult m;
    m.is_tp.assign(preds.size(), false);
    m.gt_matched.resize(gts.size());
    for (std::size_t i = 0; i < gts.size(); ++i) m.gt_matched[i].assign(gts[i].objects.size(), false);

    m.rank.resize(preds.size());
    std::iota(m.rank.begin(), m.rank.end(), 0);
    std::stable_sort(m.rank.begin(), m.rank.end(),
                     [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });

    for (const std::size_t d : m.rank) {
        const auto it = by_file.find(preds[d].image_filename);
        if (it == by_file.end()) continue;
        const auto& objects = gts[it->second].objects;
        auto& matched = m.gt_matched[it->second];
        double best = -1.0;
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < objects.size(); ++j) {
            if (matched[j] || objects[j].label != preds[d].label) continue;
            const double v = iou(preds[d].box, objects[j].box);
            if (v >= iou_threshold && v > best) {
                best = v;
                best_j = j;
            }
        }
        if (best >= 0.0) {
            matched[best_j] = true;
            m.is_tp[d] = true;
        }
    }
    return m;
}

double average_precision(const std::vector<bool>& ranked_tp, int total_gt) {
    if (total_gt < 1) throw Error(ErrorCode::ZeroGroundTruth, "average precision needs at least one ground-truth box");
    const std::size_t n = ranked_tp.size();
    std::vector<double> recall(n + 2), precision(n + 2);
    recall[0] = 0.0;
    precision[0] = 0.0;
    int tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (ranked_tp[i]) ++tp;
        recall[i + 1] = static_cast<double>(tp) / total_gt;
        precision[i + 1] = static_cast<double>(tp) / static_cast<double>(i + 1);
    }
    recall[n + 1] = 1.0;
    precision[n + 1] = 0.0;
    for (std::size_t i = n + 1; i-- > 0;) precision[i] = std::max(precision[i], precision[i + 1]);

    double ap = 0.0;
    for (std::size_t i = 0; i + 1 < recall.size(); ++i) {
        if (recall[i + 1] != recall[i]) ap += (recall[i + 1] - recall[i]) * precision[i + 1];
    }
    return ap;
}

MetricsReport compute_report(std::span<const Detection> preds, std::span<const Annotation> gts,
                             double iou_threshold, std::optional<double> score_suppress) {
    std::vector<Detection> kept;
    for (const auto& d : preds) {
        if (!score_suppress || d.score >= *score_suppress) kept.push_back(d);
    }

    MetricsReport r;
    for (const auto& a : gts) {
        for (const auto& o : a.objects) ++r.per_class[o.label].ground_truth;
    }
    for (const auto& [label, c] : r.per_class) r.total_gt += c.ground_truth;
    if (r.total_gt == 0) throw Error(ErrorCode::NoGroundTruth, "ground truth holds no objects");

    const MatchResult m = match_detections(kept, gts, iou_threshold);
    std::map<std::string, std::vector<bool>> ranked;
    for (const std::size_t d : m.rank) {
        const auto it = r.per_class.find(kept[d].label);
        if (it == r.per_class.end()) continue;
        ranked[kept[d].label].push_back(m.is_tp[d]);
        ++it->second.detections;
        if (m.is_tp[d]) ++it->second.true_positives;
    }
    for (const auto& row : m.gt_matched) r.matched_gt += static_cast<int>(std::count(row.begin(), row.end(), true));

    double sum = 0.0;
    r.ap_max = 0.0;
    r.ap_min = 1.0;
    for (auto& [label, c] : r.per_class) {
        c.ap = average_precision(ranked[label], c.ground_truth);
        sum += c.ap;
        r.ap_max = std::max(r.ap_max, c.ap);
        r.ap_min = std::min(r.ap_min, c.ap);
    }
    r.map_score = sum / static_cast<double>(r.per_class.size());
    // Keep ap_min <= mAP <= ap_max exact under floating-point summation.
    r.map_score = std::clamp(r.map_score, r.ap_min, r.ap_max);
    r.recall_score = static_cast<double>(r.matched_gt) / r.total_gt;
    return r;
}

std::string report_json(const MetricsReport& r) {
    nlohmann::ordered_json j;
    j["mAP"] = r.map_score;
    j["AP_max"] = r.ap_max;
    j["AP_min"] = r.ap_min;
    j["recall"] = r.recall_score;
    j["ground_truth"] = r.total_gt;
    j["matched"] = r.matched_gt;
    j["per_class"] = nlohmann::ordered_json::array();
    for (const auto& [label, c] : r.per_class) {
        nlohmann::ordered_json row;
        row["label"] = label;
        row["ap"] = c.ap;
        row["ground_truth"] = c.ground_truth;
        row["detections"] = c.detections;
        row["true_positives"] = c.true_positives;
        j["per_class"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

std::string report_table(const MetricsReport& r) {
    std::size_t width = 8;
    for (const auto& [label, c] : r.per_class) width = std::max(width, label.size());
    std::string out;
    out += fmt::format("{:<{}}  {:>6}\n", "metric", width, "value");
    out += fmt::format("{:<{}}  {:>6.4f}\n", "mAP", width, r.map_score);
    out += fmt::format("{:<{}}  {:>6.4f}\n", "AP_max", width, r.ap_max);
    out += fmt::format("{:<{}}  {:>6.4f}\n", "AP_min", width, r.ap_min);
    out += fmt::format("{:<{}}  {:>6.4f}\n", "recall", width, r.recall_score);
    out += "\n";
    out += fmt::format("{:<{}}  {:>6}  {:>4}  {:>4}  {:>4}\n", "class", width, "AP", "gt", "det", "tp");
    for (const auto& [label, c] : r.per_class) {
        out += fmt::format("{:<{}}  {:>6.4f}  {:>4}  {:>4}  {:>4}\n", label, width, c.ap, c.ground_truth,
                           c.detections, c.true_positives);
    }
    return out;
}

std::vector<Detection> parse_detections_jsonl(std::string_view text) {
    std::vector<Detection> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        Detection d;
        try {
            const auto j = nlohmann::json::parse(line);
            d.image_filename = j.at("image").get<std::string>();
            d.label = j.at("label").get<std::string>();
            d.box = {j.at("xmin").get<int>(), j.at("ymin").get<int>(), j.at("width").get<int>(),
                     j.at("height").get<int>()};
            d.score = j.at("score").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, "detections line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!d.box.valid())
            throw Error(ErrorCode::ParseError, "detections line " + std::to_string(lineno) + ": degenerate box");
        if (!(d.score >= 0.0 && d.score <= 1.0))
            throw Error(ErrorCode::ParseError, "detections line " + std::to_string(lineno) + ": score outside [0, 1]");
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<Detection> read_detections_jsonl(const std::filesystem::path& path) {
    return parse_detections_jsonl(read_file(path));
}

std::string to_jsonl(std::span<const Detection> dets) {
    std::string out;
    for (const auto& d : dets) {
        nlohmann::ordered_json j;
        j["image"] = d.image_filename;
        j["label"] = d.label;
        j["xmin"] = d.box.xmin;
        j["ymin"] = d.box.ymin;
        j["width"] = d.box.width;
        j["height"] = d.box.height;
        j["score"] = d.score;
        out += j.dump();
        out += '\n';
    }
    return out;
}

} // namespace autobox
