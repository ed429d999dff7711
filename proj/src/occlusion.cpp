#include "autobox/occlusion.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "autobox/error.hpp"
#include "autobox/image_ops.hpp"

namespace autobox {

void Patch::validate() const {
    if (mask.width() != pixels.width() || mask.height() != pixels.height())
        throw Error(ErrorCode::InvariantViolation, "patch mask and pixel sizes differ");
    if (mask.count() == 0) throw Error(ErrorCode::InvariantViolation, "patch mask is empty");
}

namespace {

Rgb channel_median(std::vector<Rgb> px) {
    std::uint8_t med[3];
    for (int c = 0; c < 3; ++c) {
        std::vector<std::uint8_t> v;
        v.reserve(px.size());
        for (const Rgb& p : px) v.push_back(c == 0 ? p.r : c == 1 ? p.g : p.b);
        std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
        med[c] = v[v.size() / 2];
    }
    return {med[0], med[1], med[2]};
}

} // namespace

Rgb border_median(const RasterImage& img) {
    std::vector<Rgb> ring;
    const int w = img.width(), h = img.height();
    for (int x = 0; x < w; ++x) {
        ring.push_back(img.at(x, 0));
        if (h > 1) ring.push_back(img.at(x, h - 1));
    }
    for (int y = 1; y + 1 < h; ++y) {
        ring.push_back(img.at(0, y));
        if (w > 1) ring.push_back(img.at(w - 1, y));
    }
    return channel_median(std::move(ring));
}

Rgb surround_median(const RasterImage& img, const Box& box) {
    std::vector<Rgb> ring;
    for (int y = box.ymin - 1; y <= box.ymin + box.height; ++y) {
        for (int x = box.xmin - 1; x <= box.xmin + box.width; ++x) {
            const bool edge = y == box.ymin - 1 || y == box.ymin + box.height || x == box.xmin - 1 ||
                              x == box.xmin + box.width;
            if (edge && img.contains(x, y)) ring.push_back(img.at(x, y));
        }
    }
    if (ring.empty()) return border_median(crop(img, box));
    return channel_median(std::move(ring));
}

BinaryMask make_mask(const RasterImage& pixels, Rgb background, int tolerance) {
    const int w = pixels.width(), h = pixels.height();
    std::vector<std::uint8_t> fg(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Rgb c = pixels.at(x, y);
            const int d = std::max({std::abs(c.r - background.r), std::abs(c.g - background.g),
                                    std::abs(c.b - background.b)});
            fg[static_cast<std::size_t>(y) * w + x] = d > tolerance ? 1 : 0;
        }
    }

    std::vector<int> comp(fg.size(), -1);
    std::vector<long long> sizes;
    std::vector<int> stack;
    for (int start = 0; start < w * h; ++start) {
        if (!fg[start] || comp[start] >= 0) continue;
        const int id = static_cast<int>(sizes.size());
        long long n = 0;
        comp[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            ++n;
            const int x = p % w, y = p / w;
            const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
            for (const auto& [nx, ny] : nbr) {
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                const int q = ny * w + nx;
                if (fg[q] && comp[q] < 0) {
                    comp[q] = id;
                    stack.push_back(q);
                }
            }
        }
        sizes.push_back(n);
    }
    if (sizes.empty()) throw Error(ErrorCode::EmptyForeground, "no pixel differs from the background");

    const int keep = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    BinaryMask mask(w, h);
    for (int p = 0; p < w * h; ++p) {
        if (comp[p] == keep) mask.set(p % w, p / w, true);
    }
    return mask;
}

Patch harvest_patch(const RasterImage& img, const Box& box, std::string label, std::string source_image,
                    const BackgroundModel& bg) {
    RasterImage pixels = crop(img, box);
    const Rgb background = bg.color ? *bg.color : surround_median(img, box);
    BinaryMask mask = make_mask(pixels, background, bg.tolerance);
    return {std::move(pixels), std::move(mask), std::move(label), std::move(source_image)};
}

RasterImage composite(const RasterImage& img, Point anchor, const Patch& patch) {
    if (patch.mask.width() != patch.pixels.width() || patch.mask.height() != patch.pixels.height())
        throw Error(ErrorCode::InvariantViolation, "patch mask and pixel sizes differ");
    const Box placed{anchor.x, anchor.y, patch.pixels.width(), patch.pixels.height()};
    if (intersection_area(placed, Box{0, 0, img.width(), img.height()}) == 0)
        throw Error(ErrorCode::NoOverlap, "patch placed entirely outside the image");

    RasterImage out = img;
    const int x0 = std::max(0, -anchor.x), y0 = std::max(0, -anchor.y);
    const int x1 = std::min(patch.pixels.width(), img.width() - anchor.x);
    const int y1 = std::min(patch.pixels.height(), img.height() - anchor.y);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            if (patch.mask.at(x, y)) out.set(anchor.x + x, anchor.y + y, patch.pixels.at(x, y));
        }
    }
    return out;
}

OcclusionMode parse_occlusion_mode(std::string_view s) {
    if (s == "black") return OcclusionMode::Black;
    if (s == "patch") return OcclusionMode::Patch;
    throw Error(ErrorCode::ConfigError, "unknown occlusion mode '" + std::string(s) + "'");
}

Direction parse_direction(std::string_view s) {
    if (s == "left") return Direction::Left;
    if (s == "right") return Direction::Right;
    if (s == "up") return Direction::Up;
    if (s == "down") return Direction::Down;
    throw Error(ErrorCode::ConfigError, "unknown occlusion direction '" + std::string(s) + "'");
}

std::string_view to_string(OcclusionMode m) noexcept { return m == OcclusionMode::Black ? "black" : "patch"; }

std::string_view to_string(Direction d) noexcept {
    switch (d) {
    case Direction::Left: return "left";
    case Direction::Right: return "right";
    case Direction::Up: return "up";
    case Direction::Down: return "down";
    }
    return "left";
}

Box covered_region(const Box& target, Direction direction, double coverage) {
    if (!(coverage > 0.0 && coverage <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "occlusion coverage must lie in (0, 1]");
    auto span = [&](int extent) {
        return std::clamp(static_cast<int>(std::lround(coverage * extent)), 1, extent);
    };
    switch (direction) {
    case Direction::Left: return {target.xmin, target.ymin, span(target.width), target.height};
    case Direction::Right: {
        const int w = span(target.width);
        return {target.xmax() - w, target.ymin, w, target.height};
    }
    case Direction::Up: return {target.xmin, target.ymin, target.width, span(target.height)};
    case Direction::Down: {
        const int h = span(target.height);
        return {target.xmin, target.ymax() - h, target.width, h};
    }
    }
    return target;
}

RasterImage simulate_occlusion(const RasterImage& img, const Annotation& annotation, const OcclusionSpec& spec,
                               const PatchSource* patches) {
    if (annotation.objects.empty())
        throw Error(ErrorCode::InvalidArgument, "annotation has no object to occlude");
    if (spec.mode == OcclusionMode::Patch && (patches == nullptr || patches->size() == 0))
        throw Error(ErrorCode::EmptyPatchDb, "patch mode needs a non-empty patch database");

    std::mt19937_64 rng(spec.rng_seed);
    std::uniform_int_distribution<std::size_t> pick_target(0, annotation.objects.size() - 1);
    const Box& target = annotation.objects[pick_target(rng)].box;
    const Box region = covered_region(target, spec.direction, spec.coverage);

    if (spec.mode == OcclusionMode::Black) {
        if (intersection_area(region, Box{0, 0, img.width(), img.height()}) == 0)
            throw Error(ErrorCode::NoOverlap, "occluded region lies outside the image");
        RasterImage out = img;
        fill_rect(out, region, Rgb{0, 0, 0});
        return out;
    }

    std::uniform_int_distribution<std::size_t> pick_patch(0, patches->size() - 1);
    const Patch source = patches->get(pick_patch(rng));
    Patch scaled{resize_bilinear(source.pixels, region.width, region.height),
                 resize_nearest(source.mask, region.width, region.height), source.source_label,
                 source.source_image};
    return composite(img, {region.xmin, region.ymin}, scaled);
}

} // namespace autobox
