#include "autobox/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "autobox/error.hpp"

namespace autobox {

RasterImage crop(const RasterImage& img, const Box& b) {
    if (!b.fits(img.width(), img.height())) {
        std::ostringstream msg;
        msg << "crop box " << b << " exceeds " << img.width() << "x" << img.height();
        throw Error(ErrorCode::OutOfBounds, msg.str());
    }
    RasterImage out(b.width, b.height);
    const auto src = img.data();
    auto dst = out.data();
    const std::size_t row_bytes = static_cast<std::size_t>(b.width) * 3;
    for (int y = 0; y < b.height; ++y) {
        const std::size_t from = (static_cast<std::size_t>(b.ymin + y) * img.width() + b.xmin) * 3;
        std::copy_n(src.begin() + from, row_bytes, dst.begin() + y * row_bytes);
    }
    return out;
}

void paste(RasterImage& dst, const RasterImage& src, int x, int y) {
    for (int sy = 0; sy < src.height(); ++sy) {
        for (int sx = 0; sx < src.width(); ++sx) {
            if (dst.contains(x + sx, y + sy)) dst.set(x + sx, y + sy, src.at(sx, sy));
        }
    }
}

void fill_rect(RasterImage& img, const Box& b, Rgb color) {
    const int x0 = std::max(0, b.xmin), x1 = std::min(img.width(), b.xmax());
    const int y0 = std::max(0, b.ymin), y1 = std::min(img.height(), b.ymax());
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) img.set(x, y, color);
}

namespace {

// Source coordinate and blend weight for one output index, pixel-center aligned.
struct Tap {
    int lo;
    int hi;
    float frac;
};

std::vector<Tap> make_taps(int src_len, int dst_len) {
    std::vector<Tap> taps(dst_len);
    const double scale = static_cast<double>(src_len) / dst_len;
    for (int i = 0; i < dst_len; ++i) {
        double s = (i + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src_len - 1));
        const int lo = static_cast<int>(std::floor(s));
        const int hi = std::min(lo + 1, src_len - 1);
        taps[i] = {lo, hi, static_cast<float>(s - lo)};
    }
    return taps;
}

} // namespace

RasterImage resize_bilinear(const RasterImage& img, int width, int height) {
    if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "resize target must be positive");
    if (width == img.width() && height == img.height()) return img;

    const auto xt = make_taps(img.width(), width);
    const auto yt = make_taps(img.height(), height);
    const auto src = img.data();
    const std::size_t stride = static_cast<std::size_t>(img.width()) * 3;

    RasterImage out(width, height);
    auto dst = out.data();
    std::size_t o = 0;
    for (int y = 0; y < height; ++y) {
        const auto* r0 = &src[yt[y].lo * stride];
        const auto* r1 = &src[yt[y].hi * stride];
        const float fy = yt[y].frac;
        for (int x = 0; x < width; ++x) {
            const std::size_t a = static_cast<std::size_t>(xt[x].lo) * 3;
            const std::size_t b = static_cast<std::size_t>(xt[x].hi) * 3;
            const float fx = xt[x].frac;
            for (int c = 0; c < 3; ++c) {
                const float top = r0[a + c] + (r0[b + c] - r0[a + c]) * fx;
                const float bot = r1[a + c] + (r1[b + c] - r1[a + c]) * fx;
                const float v = top + (bot - top) * fy;
                dst[o++] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return out;
}

BinaryMask resize_nearest(const BinaryMask& mask, int width, int height) {
    if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "resize target must be positive");
    BinaryMask out(width, height);
    for (int y = 0; y < height; ++y) {
        const int sy = std::min(mask.height() - 1,
                                static_cast<int>((static_cast<long long>(y) * 2 + 1) * mask.height() /
                                                 (2LL * height)));
        for (int x = 0; x < width; ++x) {
            const int sx = std::min(mask.width() - 1,
                                    static_cast<int>((static_cast<long long>(x) * 2 + 1) * mask.width() /
                                                     (2LL * width)));
            out.set(x, y, mask.at(sx, sy));
        }
    }
    return out;
}

RasterImage resize_preserve_aspect(const RasterImage& img, int target_long_side) {
    if (target_long_side < 1) throw Error(ErrorCode::InvalidArgument, "target_long_side must be >= 1");
    const int long_side = std::max(img.width(), img.height());
    if (long_side <= target_long_side) return img;

    const double scale = static_cast<double>(target_long_side) / long_side;
    int w = img.width() >= img.height() ? target_long_side
                                         : static_cast<int>(std::lround(img.width() * scale));
    int h = img.height() > img.width() ? target_long_side
                                       : static_cast<int>(std::lround(img.height() * scale));
    return resize_bilinear(img, std::max(w, 1), std::max(h, 1));
}

} // namespace autobox
