#pragma once

#include <compare>
#include <iosfwd>

namespace autobox {

/// Axis-aligned pixel rectangle: left-top corner plus extent. Right and bottom
/// edges are exclusive (xmax = xmin + width).
struct Box {
    int xmin = 0;
    int ymin = 0;
    int width = 1;
    int height = 1;

    int xmax() const noexcept { return xmin + width; }
    int ymax() const noexcept { return ymin + height; }
    long long area() const noexcept { return static_cast<long long>(width) * height; }

    bool valid() const noexcept { return width >= 1 && height >= 1; }
    bool fits(int image_width, int image_height) const noexcept {
        return valid() && xmin >= 0 && ymin >= 0 && xmax() <= image_width &&
               ymax() <= image_height;
    }

    friend auto operator<=>(const Box&, const Box&) = default;
};

std::ostream& operator<<(std::ostream& os, const Box& b);

long long intersection_area(const Box& a, const Box& b) noexcept;

/// Intersection over union in [0, 1]. Both boxes must be valid.
double iou(const Box& a, const Box& b) noexcept;

/// Smallest box containing both a and b.
Box union_box(const Box& a, const Box& b) noexcept;

/// True when inner lies entirely within outer.
bool contains(const Box& outer, const Box& inner) noexcept;

} // namespace autobox
