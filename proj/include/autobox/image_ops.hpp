#pragma once

#include "autobox/box.hpp"
#include "autobox/image.hpp"

namespace autobox {

/// Copy of the pixels under b. Throws OutOfBounds when b leaves the image.
RasterImage crop(const RasterImage& img, const Box& b);

/// Writes src into dst with its top-left corner at (x, y); pixels falling
/// outside dst are ignored.
void paste(RasterImage& dst, const RasterImage& src, int x, int y);

void fill_rect(RasterImage& img, const Box& b, Rgb color);

/// Bilinear resampling with pixel-center alignment. Deterministic: the same
/// input and size always give bit-identical output.
RasterImage resize_bilinear(const RasterImage& img, int width, int height);

BinaryMask resize_nearest(const BinaryMask& mask, int width, int height);

/// Shrinks img so its longer side equals target_long_side, preserving the
/// aspect ratio to the nearest integer. Images already within the target are
/// returned unchanged.
RasterImage resize_preserve_aspect(const RasterImage& img, int target_long_side);

} // namespace autobox
