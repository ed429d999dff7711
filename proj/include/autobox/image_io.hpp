#pragma once

#include <filesystem>

#include "autobox/image.hpp"

namespace autobox {

/// Format is chosen by extension (.png, .jpg/.jpeg, anything else OpenCV's
/// codecs accept). Failures throw IoFailure.
RasterImage read_image(const std::filesystem::path& path);
void write_image(const RasterImage& img, const std::filesystem::path& path);

/// PNG with an alpha channel carrying the mask: 255 = set, 0 = clear. Alpha
/// values are read back as set when >= 128.
void write_rgba_png(const RasterImage& img, const BinaryMask& mask,
                    const std::filesystem::path& path);
std::pair<RasterImage, BinaryMask> read_rgba_png(const std::filesystem::path& path);

} // namespace autobox
