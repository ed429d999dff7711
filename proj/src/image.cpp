#include "autobox/image.hpp"

#include <algorithm>
#include <string>

#include "autobox/error.hpp"

namespace autobox {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "image dimensions must be positive, got " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
}

} // namespace

RasterImage::RasterImage(int width, int height, Rgb fill) : width_(width), height_(height) {
    check_dims(width, height);
    pixels_.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
        pixels_[i] = fill.r;
        pixels_[i + 1] = fill.g;
        pixels_[i + 2] = fill.b;
    }
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dims(width, height);
    if (pixels_.size() != static_cast<std::size_t>(width) * height * 3) {
        throw Error(ErrorCode::InvalidArgument, "pixel buffer length does not match width*height*3");
    }
}

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
    check_dims(width, height);
    bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

long long BinaryMask::count() const noexcept {
    return std::count(bits_.begin(), bits_.end(), std::uint8_t{1});
}

} // namespace autobox
