#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "autobox/annotation.hpp"
#include "autobox/confirm.hpp"
#include "autobox/image.hpp"

namespace autobox {

struct Sprite {
    std::string label;
    RasterImage pixels;
    BinaryMask mask; // pixels drawn onto the canvas
};

enum class SpriteFamily { Solid, Gradient, Striped, Ellipse };

/// Built-in category k has label "prodNN", its own hue band, and one of the
/// four families (k mod 4).
std::string builtin_label(int category);
SpriteFamily builtin_family(int category);
Sprite render_builtin_sprite(int category, int width, int height, int category_count = 12);

struct SceneSpec {
    int canvas_width = 640;
    int canvas_height = 480;
    Rgb background{200, 200, 200};
    int noise_amplitude = 0;       // uniform +-amplitude per channel on the background
    std::vector<Sprite> sprite_set; // empty: built-in sprites at random sizes
    int builtin_categories = 12;
    int sprite_min = 60;           // built-in sprite side range, pixels
    int sprite_max = 140;
    int n_objects = 1;
    int min_gap = 20;              // Chebyshev separation between placed boxes
    std::uint64_t rng_seed = 0;
    std::string image_filename = "scene.png";

    void validate() const;
};

struct Scene {
    RasterImage image;
    Annotation annotation;
};

/// Chebyshev gap between two boxes; negative when they overlap.
int box_gap(const Box& a, const Box& b) noexcept;

/// Places n_objects sprites at seeded non-overlapping positions. Annotation
/// boxes are the tight boxes of the drawn sprite masks. Throws
/// PlacementFailure after 1000 rejected positions for one sprite.
Scene generate_scene(const SceneSpec& spec);

struct CorpusSpec {
    SceneSpec scene;                       // n_objects, rng_seed, image_filename are overridden
    int count = 10;
    std::vector<int> n_values{1, 2, 3, 4, 5}; // N drawn uniformly from this list
    std::uint64_t seed = 0;
};

struct CorpusResult {
    DatasetManifest manifest;            // annotated with ground-truth paths
    std::vector<std::string> skipped;    // "<image>: <reason>" per failed scene
};

/// Writes images/scene_NNNN.png, annotations/scene_NNNN.xml and manifest.txt
/// under out_dir. Paths in the manifest are relative to out_dir.
CorpusResult generate_corpus(const CorpusSpec& spec, const std::filesystem::path& out_dir);

/// Tight crops of built-in sprites over `background` for training the
/// baseline classifier: `per_category` crops per category at seeded sizes.
std::vector<LabeledCrop> builtin_training_crops(int category_count, int per_category, int sprite_min,
                                                int sprite_max, Rgb background, std::uint64_t seed);

} // namespace autobox
