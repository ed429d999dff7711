#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autobox/annotation.hpp"
#include "autobox/box.hpp"
#include "autobox/image.hpp"

namespace autobox {

/// Masked product crop used as an occluder.
struct Patch {
    RasterImage pixels;
    BinaryMask mask;
    std::string source_label;
    std::string source_image;

    /// Throws InvariantViolation: mask size equals pixel size, mask non-empty.
    void validate() const;

    friend bool operator==(const Patch&, const Patch&) = default;
};

/// How a crop's background colour is found before thresholding.
struct BackgroundModel {
    std::optional<Rgb> color; // unset: surround_median of the box
    int tolerance = 30;       // per-channel distance that still counts as background
};

/// Per-channel median of the outermost pixel ring.
Rgb border_median(const RasterImage& img);

/// Per-channel median of the one-pixel ring just outside `box` (clipped to
/// the image); border_median of the crop when the box spans the whole image.
Rgb surround_median(const RasterImage& img, const Box& box);

/// Foreground = pixels whose largest per-channel distance to `background`
/// exceeds `tolerance`; only the largest 4-connected foreground component is
/// kept (ties: first in raster order). Throws EmptyForeground.
BinaryMask make_mask(const RasterImage& pixels, Rgb background, int tolerance);

Patch harvest_patch(const RasterImage& img, const Box& box, std::string label, std::string source_image,
                    const BackgroundModel& bg = {});

struct Point {
    int x = 0;
    int y = 0;
};

/// out[i] = patch[i] where the placed mask is set, img[i] elsewhere. Patch
/// pixels falling outside img are ignored. Throws NoOverlap when none land.
RasterImage composite(const RasterImage& img, Point anchor, const Patch& patch);

/// Random-access view of a patch collection.
class PatchSource {
public:
    virtual ~PatchSource() = default;
    virtual std::size_t size() const = 0;
    virtual Patch get(std::size_t index) const = 0;
};

class InMemoryPatches : public PatchSource {
public:
    explicit InMemoryPatches(std::vector<Patch> patches) : patches_(std::move(patches)) {}
    std::size_t size() const override { return patches_.size(); }
    Patch get(std::size_t index) const override { return patches_.at(index); }

private:
    std::vector<Patch> patches_;
};

enum class OcclusionMode { Black, Patch };
enum class Direction { Left, Right, Up, Down };

OcclusionMode parse_occlusion_mode(std::string_view s);
Direction parse_direction(std::string_view s);
std::string_view to_string(OcclusionMode m) noexcept;
std::string_view to_string(Direction d) noexcept;

struct OcclusionSpec {
    OcclusionMode mode = OcclusionMode::Black;
    Direction direction = Direction::Left;
    double coverage = 0.3; // fraction of the target box along the direction's axis, (0, 1]
    std::uint64_t rng_seed = 0;
};

/// Part of `target` covered by an occluder entering from `direction`:
/// round(coverage * extent) rows or columns, at least one.
Box covered_region(const Box& target, Direction direction, double coverage);

/// Picks a target object (seeded), then blackens its covered region or
/// composites a seeded random patch from `patches`, rescaled to that region.
/// The annotation is not modified. `patches` may be null in black mode.
/// Throws EmptyPatchDb in patch mode without patches.
RasterImage simulate_occlusion(const RasterImage& img, const Annotation& annotation, const OcclusionSpec& spec,
                               const PatchSource* patches);

} // namespace autobox
