#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "autobox/box.hpp"
#include "autobox/features.hpp"
#include "autobox/image.hpp"
#include "autobox/segmentation.hpp"

namespace autobox {

/// Ordered candidate boxes for one image.
using ProposalSet = std::vector<Box>;

/// A region during hierarchical grouping. Histograms are L1-normalized.
struct Segment {
    int id = 0;
    long long pixel_count = 0;
    Box bbox;
    ColorHist color{};
    TextureHist texture{};
};

/// Which similarity components contribute to the grouping score.
struct SimilarityWeights {
    bool color = true;
    bool texture = true;
    bool size = true;
    bool fill = true;
};

/// Sum of the enabled components, each in [0, 1].
double similarity(const Segment& a, const Segment& b, long long image_area,
                  const SimilarityWeights& weights = {}) noexcept;

/// Merged region: union box, summed size, size-weighted histograms.
Segment merge_segments(const Segment& a, const Segment& b, int new_id) noexcept;

/// One Segment per segmentation label (id == label).
std::vector<Segment> describe_segments(const RasterImage& img, const Segmentation& seg);

/// Unordered pairs (lo, hi) of 4-adjacent segment labels, sorted.
std::vector<std::pair<int, int>> segment_adjacency(const Segmentation& seg);

struct Hierarchy {
    int initial_count = 0;
    std::vector<Segment> regions;              // initial segments, then one per merge
    std::vector<std::pair<int, int>> merges;   // children of regions[initial_count + i]
};

/// Greedy agglomeration: repeatedly merges the most similar adjacent pair.
/// Equal similarities are broken by the lexicographically smaller id pair.
Hierarchy group_segments(std::vector<Segment> initial,
                         const std::vector<std::pair<int, int>>& adjacency,
                         long long image_area, const SimilarityWeights& weights = {});

struct ProposalConfig {
    SegmentationConfig segmentation;
    SimilarityWeights weights;
};

/// Selective-search style region proposals: every region box produced by
/// hierarchical grouping of the over-segmentation, exact duplicates removed
/// (first occurrence kept).
ProposalSet propose(const RasterImage& img, const ProposalConfig& config = {});

/// Debug dump, one JSON object per line: {"xmin":..,"ymin":..,"width":..,"height":..}
void write_proposals_jsonl(const ProposalSet& rp, const std::filesystem::path& path);
ProposalSet read_proposals_jsonl(const std::filesystem::path& path);

} // namespace autobox
