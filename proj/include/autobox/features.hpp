#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "autobox/image.hpp"

namespace autobox {

inline constexpr int kColorBinsPerChannel = 25;
inline constexpr int kColorBins = kColorBinsPerChannel * 3;
inline constexpr int kOrientations = 8;
inline constexpr int kMagnitudeBins = 10;
inline constexpr int kTextureBinsPerChannel = kOrientations * kMagnitudeBins;
inline constexpr int kTextureBins = kTextureBinsPerChannel * 3;

using ColorHist = std::array<double, kColorBins>;
using TextureHist = std::array<double, kTextureBins>;

struct Hsv {
    double h; // degrees, [0, 360)
    double s; // [0, 1]
    double v; // [0, 1]
};

Hsv to_hsv(Rgb c) noexcept;

/// Per-pixel histogram bin indices, computed once per image. Color bins come
/// from HSV (25 per channel); texture bins from RGB central-difference
/// gradients (8 orientations x 10 magnitude levels per channel).
struct PixelBins {
    int width = 0;
    int height = 0;
    std::vector<std::array<std::uint8_t, 3>> color;   // 0..24 per channel
    std::vector<std::array<std::uint8_t, 3>> texture; // 0..79 per channel
};

PixelBins compute_pixel_bins(const RasterImage& img);

/// Unnormalized bin counts; add pixels then call normalized().
struct HistogramAccumulator {
    std::array<long long, kColorBins> color{};
    std::array<long long, kTextureBins> texture{};
    long long pixels = 0;

    void add(const PixelBins& bins, std::size_t pixel_index) noexcept;
    ColorHist color_hist() const noexcept;
    TextureHist texture_hist() const noexcept;
};

/// sum_i min(a_i, b_i)
template <std::size_t N>
double histogram_intersection(const std::array<double, N>& a, const std::array<double, N>& b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += a[i] < b[i] ? a[i] : b[i];
    return s;
}

} // namespace autobox
