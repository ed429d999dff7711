#include "autobox/box.hpp"

#include <algorithm>
#include <ostream>

namespace autobox {

std::ostream& operator<<(std::ostream& os, const Box& b) {
    return os << "(" << b.xmin << "," << b.ymin << "," << b.width << "," << b.height << ")";
}

long long intersection_area(const Box& a, const Box& b) noexcept {
    const long long w = std::min(a.xmax(), b.xmax()) - std::max(a.xmin, b.xmin);
    const long long h = std::min(a.ymax(), b.ymax()) - std::max(a.ymin, b.ymin);
    if (w <= 0 || h <= 0) return 0;
    return w * h;
}

double iou(const Box& a, const Box& b) noexcept {
    const long long inter = intersection_area(a, b);
    const long long uni = a.area() + b.area() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

Box union_box(const Box& a, const Box& b) noexcept {
    const int x0 = std::min(a.xmin, b.xmin);
    const int y0 = std::min(a.ymin, b.ymin);
    const int x1 = std::max(a.xmax(), b.xmax());
    const int y1 = std::max(a.ymax(), b.ymax());
    return {x0, y0, x1 - x0, y1 - y0};
}

bool contains(const Box& outer, const Box& inner) noexcept {
    return inner.xmin >= outer.xmin && inner.ymin >= outer.ymin &&
           inner.xmax() <= outer.xmax() && inner.ymax() <= outer.ymax();
}

} // namespace autobox
