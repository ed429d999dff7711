#include "autobox/extract.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "autobox/error.hpp"

namespace autobox {

MergeMode parse_merge_mode(std::string_view s) {
    if (s == "union") return MergeMode::Union;
    if (s == "representative") return MergeMode::Representative;
    throw Error(ErrorCode::ConfigError, "unknown merge mode '" + std::string(s) + "'");
}

std::string_view to_string(MergeMode m) noexcept {
    return m == MergeMode::Union ? "union" : "representative";
}

void ExtractConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); };
    if (!(initial_iou_threshold >= 0.0 && initial_iou_threshold < iou_threshold_max))
        fail("extract.initial_iou_threshold must lie in [0, iou_threshold_max)");
    if (!(iou_threshold_max <= 1.0)) fail("extract.iou_threshold_max must be <= 1");
    if (area_min < 1) fail("extract.area_min must be >= 1");
    if (!(aspect_max >= 1.0)) fail("extract.aspect_max must be >= 1");
    if (max_iterations < 1) fail("extract.max_iterations must be >= 1");
    if (!(area_max_fraction > 0.0 && area_max_fraction <= 1.0))
        fail("extract.area_max_fraction must lie in (0, 1]");
}

ProposalSet filter_proposals(const ProposalSet& rp, long long area_min, double aspect_max) {
    ProposalSet out;
    for (const auto& b : rp) {
        if (b.area() < area_min) continue;
        const double w = b.width, h = b.height;
        if (w / h > aspect_max || h / w > aspect_max) continue;
        out.push_back(b);
    }
    return out;
}

ProposalSet filter_oversized(const ProposalSet& rp, long long image_area, double max_fraction) {
    ProposalSet out;
    for (const auto& b : rp) {
        if (static_cast<double>(b.area()) > max_fraction * static_cast<double>(image_area)) continue;
        out.push_back(b);
    }
    return out;
}

ProposalSet merge_pass(const ProposalSet& rp, double iou_threshold, MergeMode mode) {
    ProposalSet order = rp;
    std::stable_sort(order.begin(), order.end(), [](const Box& l, const Box& r) {
        if (l.area() != r.area()) return l.area() > r.area();
        return l < r;
    });

    ProposalSet accepted;
    for (const auto& p : order) {
        bool absorbed = false;
        for (auto& q : accepted) {
            if (iou(p, q) > iou_threshold) {
                if (mode == MergeMode::Union) q = union_box(p, q);
                absorbed = true;
                break;
            }
        }
        if (!absorbed) accepted.push_back(p);
    }

    ProposalSet out;
    std::set<Box> seen;
    for (const auto& b : accepted) {
        if (seen.insert(b).second) out.push_back(b);
    }
    return out;
}

double threshold_step(int current_count, int n_objects) {
    return static_cast<double>(current_count - n_objects) / 100.0;
}

ExtractResult extract_from_proposals(const ProposalSet& rp, int image_width, int image_height,
                                     int n_objects, const ExtractConfig& config) {
    config.validate();
    if (n_objects < 1) throw Error(ErrorCode::InvalidArgument, "n_objects must be >= 1");

    const long long image_area = static_cast<long long>(image_width) * image_height;
    ProposalSet current = filter_oversized(
        filter_proposals(rp, config.area_min, config.aspect_max), image_area, config.area_max_fraction);
    if (static_cast<int>(current.size()) < n_objects) {
        throw Error(ErrorCode::InsufficientProposals,
                    std::to_string(current.size()) + " proposals survive filtering, need " +
                        std::to_string(n_objects));
    }

    // I_th moves against the step: above N it drops so the next pass merges
    // more; after an undershoot it rises and the pass is retried from the
    // pre-pass set.
    auto adjust = [&](double threshold, int count) {
        return std::clamp(threshold - threshold_step(count, n_objects), 0.0, config.iou_threshold_max);
    };

    ExtractResult result;
    double threshold = config.initial_iou_threshold;
    int iterations = 0;
    while (static_cast<int>(current.size()) != n_objects) {
        if (iterations == config.max_iterations) {
            throw Error(ErrorCode::NonConvergence,
                        std::to_string(current.size()) + " boxes remain after " +
                            std::to_string(iterations) + " passes, need " + std::to_string(n_objects));
        }
        ProposalSet next = merge_pass(current, threshold, config.merge_mode);
        ++iterations;
        const int count = static_cast<int>(next.size());
        threshold = adjust(threshold, count);
        if (count >= n_objects) current = std::move(next);
    }

    result.boxes = std::move(current);
    result.iterations_used = iterations;
    result.final_iou_threshold = threshold;
    return result;
}

ExtractResult extract(const RasterImage& img, int n_objects, const ExtractConfig& config,
                      const ProposalConfig& proposal_config) {
    config.validate();
    return extract_from_proposals(propose(img, proposal_config), img.width(), img.height(), n_objects,
                                  config);
}

} // namespace autobox
