#pragma once

#include <vector>

#include "autobox/image.hpp"

namespace autobox {

struct SegmentationConfig {
    double scale = 300.0;        // k in the tau(C) = k / |C| merge predicate
    double sigma = 0.8;          // Gaussian pre-smoothing; 0 disables it
    int min_segment_size = 50;   // components below this are absorbed by neighbours
};

/// Pixel -> segment id map. Ids are dense, numbered in raster order of each
/// segment's first pixel.
struct Segmentation {
    int width = 0;
    int height = 0;
    int count = 0;
    std::vector<int> labels;

    int at(int x, int y) const noexcept { return labels[static_cast<std::size_t>(y) * width + x]; }
};

/// Graph-based over-segmentation (Felzenszwalb-Huttenlocher) on the
/// 4-neighbour pixel grid, so every segment is 4-connected.
Segmentation oversegment(const RasterImage& img, const SegmentationConfig& config = {});

} // namespace autobox
