#include "autobox/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace autobox {

Hsv to_hsv(Rgb c) noexcept {
    const double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double d = mx - mn;
    double h = 0.0;
    if (d > 0.0) {
        if (mx == r) h = 60.0 * std::fmod((g - b) / d, 6.0);
        else if (mx == g) h = 60.0 * ((b - r) / d + 2.0);
        else h = 60.0 * ((r - g) / d + 4.0);
        if (h < 0.0) h += 360.0;
        if (h >= 360.0) h -= 360.0;
    }
    const double s = mx > 0.0 ? d / mx : 0.0;
    return {h, s, mx};
}

namespace {

std::uint8_t unit_bin(double v, int bins) {
    return static_cast<std::uint8_t>(std::clamp(static_cast<int>(v * bins), 0, bins - 1));
}

// Largest possible central-difference magnitude for 8-bit data.
constexpr double kMaxGradient = 360.63;

} // namespace

PixelBins compute_pixel_bins(const RasterImage& img) {
    const int w = img.width(), h = img.height();
    PixelBins bins;
    bins.width = w;
    bins.height = h;
    bins.color.resize(static_cast<std::size_t>(w) * h);
    bins.texture.resize(static_cast<std::size_t>(w) * h);

    const auto px = img.data();
    auto value = [&](int x, int y, int c) {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return static_cast<int>(px[(static_cast<std::size_t>(y) * w + x) * 3 + c]);
    };

    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const Hsv hsv = to_hsv(img.at(x, y));
            bins.color[i] = {unit_bin(hsv.h / 360.0, kColorBinsPerChannel),
                             unit_bin(hsv.s, kColorBinsPerChannel),
                             unit_bin(hsv.v, kColorBinsPerChannel)};
            for (int c = 0; c < 3; ++c) {
                const int gx = value(x + 1, y, c) - value(x - 1, y, c);
                const int gy = value(x, y + 1, c) - value(x, y - 1, c);
                double theta = std::atan2(static_cast<double>(gy), static_cast<double>(gx));
                if (theta < 0.0) theta += two_pi;
                const int orient = std::min(kOrientations - 1, static_cast<int>(theta / two_pi * kOrientations));
                const double mag = std::sqrt(static_cast<double>(gx * gx + gy * gy));
                const int level = unit_bin(mag / kMaxGradient, kMagnitudeBins);
                bins.texture[i][c] = static_cast<std::uint8_t>(orient * kMagnitudeBins + level);
            }
        }
    }
    return bins;
}

void HistogramAccumulator::add(const PixelBins& bins, std::size_t pixel_index) noexcept {
    const auto& cb = bins.color[pixel_index];
    const auto& tb = bins.texture[pixel_index];
    for (int c = 0; c < 3; ++c) {
        ++color[c * kColorBinsPerChannel + cb[c]];
        ++texture[c * kTextureBinsPerChannel + tb[c]];
    }
    ++pixels;
}

ColorHist HistogramAccumulator::color_hist() const noexcept {
    ColorHist h{};
    if (pixels == 0) return h;
    const double norm = 3.0 * static_cast<double>(pixels);
    for (int i = 0; i < kColorBins; ++i) h[i] = color[i] / norm;
    return h;
}

TextureHist HistogramAccumulator::texture_hist() const noexcept {
    TextureHist h{};
    if (pixels == 0) return h;
    const double norm = 3.0 * static_cast<double>(pixels);
    for (int i = 0; i < kTextureBins; ++i) h[i] = texture[i] / norm;
    return h;
}

} // namespace autobox
