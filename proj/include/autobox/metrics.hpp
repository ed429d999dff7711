#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autobox/annotation.hpp"
#include "autobox/box.hpp"

namespace autobox {

struct Detection {
    std::string image_filename;
    std::string label;
    Box box;
    double score = 0.0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

struct MatchResult {
    std::vector<bool> is_tp;                      // per detection, input order
    std::vector<std::vector<bool>> gt_matched;    // per annotation, per object
    std::vector<std::size_t> rank;                // detection indices by descending score
};

/// Greedy VOC-style matching. Detections are visited by descending score
/// (stable, so ties keep input order); each takes the highest-IoU unmatched
/// ground-truth box of the same label and image with IoU >= iou_threshold.
/// Ground-truth image filenames must be unique.
MatchResult match_detections(std::span<const Detection> preds, std::span<const Annotation> gts,
                             double iou_threshold);

/// All-points interpolated AP of a ranked TP/FP sequence.
/// Throws ZeroGroundTruth when total_gt < 1.
double average_precision(const std::vector<bool>& ranked_tp, int total_gt);

struct ClassMetrics {
    double ap = 0.0;
    int ground_truth = 0;
    int detections = 0;
    int true_positives = 0;

    friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct MetricsReport {
    std::map<std::string, ClassMetrics> per_class; // classes with at least one ground-truth box
    double map_score = 0.0;
    double ap_max = 0.0;
    double ap_min = 0.0;
    double recall_score = 0.0;
    int total_gt = 0;
    int matched_gt = 0;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Per-class AP, their mean/max/min, and micro-averaged recall. Predictions
/// scoring below score_suppress (when set) are dropped first.
/// Throws NoGroundTruth when gts holds no object.
MetricsReport compute_report(std::span<const Detection> preds, std::span<const Annotation> gts,
                             double iou_threshold = 0.5, std::optional<double> score_suppress = std::nullopt);

std::string report_json(const MetricsReport& r);
/// Aligned table with the mAP / AP_max / AP_min / recall rows, then per class.
std::string report_table(const MetricsReport& r);

/// JSON lines: {"image","label","xmin","ymin","width","height","score"},
/// 0-based exclusive box convention.
std::vector<Detection> read_detections_jsonl(const std::filesystem::path& path);
std::vector<Detection> parse_detections_jsonl(std::string_view text);
std::string to_jsonl(std::span<const Detection> dets);

} // namespace autobox
