#pragma once

#include <string_view>
#include <vector>

#include "autobox/box.hpp"
#include "autobox/image.hpp"
#include "autobox/selective_search.hpp"

namespace autobox {

enum class MergeMode {
    Union,          // an overlapping box grows the accepted box to their union
    Representative, // an overlapping box is discarded; the accepted box is kept as is
};

MergeMode parse_merge_mode(std::string_view s);
std::string_view to_string(MergeMode m) noexcept;

struct ExtractConfig {
    double initial_iou_threshold = 0.1;
    long long area_min = 500;        // proposals with W*H below this are dropped
    double aspect_max = 4.0;         // proposals with W/H or H/W above this are dropped
    double iou_threshold_max = 0.95; // I_th is clamped to [0, iou_threshold_max]
    int max_iterations = 100;
    MergeMode merge_mode = MergeMode::Union;
    // Proposals covering more than this fraction of the image are background
    // (whole-frame) regions and are dropped together with the small ones.
    double area_max_fraction = 0.9;

    /// Throws ConfigError when an invariant does not hold.
    void validate() const;
};

struct ExtractResult {
    std::vector<Box> boxes;
    int iterations_used = 0;
    double final_iou_threshold = 0.0;
};

/// Keeps boxes with W*H >= area_min and max(W/H, H/W) <= aspect_max, in order.
ProposalSet filter_proposals(const ProposalSet& rp, long long area_min, double aspect_max);

/// Drops boxes whose area exceeds max_fraction of the image, in order.
ProposalSet filter_oversized(const ProposalSet& rp, long long image_area, double max_fraction);

/// One pass of the merge loop. Boxes are visited by descending area (ties in
/// ascending coordinate order); each is compared against the boxes accepted so
/// far and, on the first one with iou > iou_threshold, is either folded into it
/// (Union) or dropped (Representative). Otherwise it is accepted. Exact
/// duplicates produced by union growth are collapsed.
ProposalSet merge_pass(const ProposalSet& rp, double iou_threshold, MergeMode mode);

/// (current_count - n_objects) / 100
double threshold_step(int current_count, int n_objects);

/// The merge loop on an existing proposal set: filter, then merge passes with
/// an adaptive threshold until exactly n_objects boxes remain.
/// Throws InsufficientProposals or NonConvergence; never returns a wrong count.
ExtractResult extract_from_proposals(const ProposalSet& rp, int image_width, int image_height,
                                     int n_objects, const ExtractConfig& config = {});

/// propose() followed by extract_from_proposals().
ExtractResult extract(const RasterImage& img, int n_objects, const ExtractConfig& config = {},
                      const ProposalConfig& proposal_config = {});

} // namespace autobox
