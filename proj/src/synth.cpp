#include "autobox/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "autobox/error.hpp"
#include "autobox/image_io.hpp"

namespace autobox {

namespace fs = std::filesystem;

namespace {

Rgb from_hsv(double h, double s, double v) {
    const double c = v * s;
    const double hp = std::fmod(h, 360.0) / 60.0;
    const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) r = c, g = x;
    else if (hp < 2) r = x, g = c;
    else if (hp < 3) g = c, b = x;
    else if (hp < 4) g = x, b = c;
    else if (hp < 5) r = x, b = c;
    else r = c, b = x;
    const double m = v - c;
    auto to8 = [](double u) { return static_cast<std::uint8_t>(std::clamp(std::lround(u * 255.0), 0L, 255L)); };
    return {to8(r + m), to8(g + m), to8(b + m)};
}

Box mask_bounds(const BinaryMask& m) {
    int x0 = m.width(), y0 = m.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (m.at(x, y)) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

} // namespace

std::string builtin_label(int category) { return fmt::format("prod{:02}", category); }

SpriteFamily builtin_family(int category) { return static_cast<SpriteFamily>(category % 4); }

Sprite render_builtin_sprite(int category, int width, int height, int category_count) {
    if (category < 0 || category >= category_count)
        throw Error(ErrorCode::InvalidArgument, "built-in category out of range");
    const double hue = 360.0 * category / category_count;
    Sprite s{builtin_label(category), RasterImage(width, height, from_hsv(hue, 0.85, 0.85)),
             BinaryMask(width, height, true)};
    switch (builtin_family(category)) {
    case SpriteFamily::Solid: break;
    case SpriteFamily::Gradient:
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const double t = width > 1 ? static_cast<double>(x) / (width - 1) : 0.0;
                s.pixels.set(x, y, from_hsv(hue, 0.85, 0.6 + 0.35 * t));
            }
        break;
    case SpriteFamily::Striped:
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const int stripe = x * 4 / width;
                s.pixels.set(x, y, from_hsv(hue, 0.85, stripe % 2 == 0 ? 0.95 : 0.6));
            }
        break;
    case SpriteFamily::Ellipse: {
        const double rx = width / 2.0, ry = height / 2.0;
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const double dx = (x + 0.5 - rx) / rx, dy = (y + 0.5 - ry) / ry;
                s.mask.set(x, y, dx * dx + dy * dy <= 1.0);
            }
        break;
    }
    }
    return s;
}

void SceneSpec::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); };
    if (canvas_width < 1 || canvas_height < 1) fail("synth canvas must be positive");
    if (n_objects < 1) fail("synth n_objects must be >= 1");
    if (min_gap < 0) fail("synth min_gap must be >= 0");
    if (noise_amplitude < 0 || noise_amplitude > 255) fail("synth noise amplitude must lie in [0, 255]");
    if (sprite_set.empty()) {
        if (builtin_categories < 1) fail("synth needs at least one built-in category");
        if (sprite_min < 1 || sprite_max < sprite_min) fail("synth sprite size range is invalid");
    }
    for (const auto& s : sprite_set) {
        if (s.mask.width() != s.pixels.width() || s.mask.height() != s.pixels.height() || s.mask.count() == 0)
            fail("sprite '" + s.label + "' has an invalid mask");
    }
}

int box_gap(const Box& a, const Box& b) noexcept {
    return std::max({b.xmin - a.xmax(), a.xmin - b.xmax(), b.ymin - a.ymax(), a.ymin - b.ymax()});
}

Scene generate_scene(const SceneSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.rng_seed);
    RasterImage img(spec.canvas_width, spec.canvas_height, spec.background);
    if (spec.noise_amplitude > 0) {
        std::uniform_int_distribution<int> noise(-spec.noise_amplitude, spec.noise_amplitude);
        for (auto& v : img.data()) v = static_cast<std::uint8_t>(std::clamp(v + noise(rng), 0, 255));
    }

    Annotation ann;
    ann.image_filename = spec.image_filename;
    ann.image_width = spec.canvas_width;
    ann.image_height = spec.canvas_height;

    std::vector<Box> placed;
    for (int k = 0; k < spec.n_objects; ++k) {
        Sprite sprite = [&] {
            if (!spec.sprite_set.empty()) {
                std::uniform_int_distribution<std::size_t> pick(0, spec.sprite_set.size() - 1);
                return spec.sprite_set[pick(rng)];
            }
            std::uniform_int_distribution<int> cat(0, spec.builtin_categories - 1);
            std::uniform_int_distribution<int> side(spec.sprite_min, spec.sprite_max);
            const int c = cat(rng);
            const int w = side(rng);
            const int h = side(rng);
            return render_builtin_sprite(c, w, h, spec.builtin_categories);
        }();
        const int w = sprite.pixels.width(), h = sprite.pixels.height();
        if (w > spec.canvas_width || h > spec.canvas_height) {
            throw Error(ErrorCode::PlacementFailure,
                        fmt::format("sprite {}x{} does not fit the {}x{} canvas", w, h, spec.canvas_width,
                                    spec.canvas_height));
        }
        std::uniform_int_distribution<int> px(0, spec.canvas_width - w);
        std::uniform_int_distribution<int> py(0, spec.canvas_height - h);
        const Box local = mask_bounds(sprite.mask);
        bool ok = false;
        Box where;
        for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
            const int x = px(rng), y = py(rng);
            where = {x + local.xmin, y + local.ymin, local.width, local.height};
            ok = std::all_of(placed.begin(), placed.end(),
                             [&](const Box& b) { return box_gap(where, b) >= spec.min_gap; });
        }
        if (!ok) {
            throw Error(ErrorCode::PlacementFailure,
                        fmt::format("no room for object {} of {} after 1000 attempts", k + 1, spec.n_objects));
        }
        const int ox = where.xmin - local.xmin, oy = where.ymin - local.ymin;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (sprite.mask.at(x, y)) img.set(ox + x, oy + y, sprite.pixels.at(x, y));
        placed.push_back(where);
        ann.objects.push_back({sprite.label, where});
    }
    return {std::move(img), std::move(ann)};
}

CorpusResult generate_corpus(const CorpusSpec& spec, const fs::path& out_dir) {
    if (spec.count < 0) throw Error(ErrorCode::ConfigError, "synth.count must be >= 0");
    if (spec.n_values.empty()) throw Error(ErrorCode::ConfigError, "synth.n_values must not be empty");
    for (const int n : spec.n_values)
        if (n < 1) throw Error(ErrorCode::ConfigError, "synth.n_values entries must be >= 1");

    std::error_code ec;
    fs::create_directories(out_dir / "images", ec);
    fs::create_directories(out_dir / "annotations", ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create corpus directories under " + out_dir.string());

    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<std::size_t> pick_n(0, spec.n_values.size() - 1);
    CorpusResult result;
    for (int i = 0; i < spec.count; ++i) {
        SceneSpec s = spec.scene;
        s.n_objects = spec.n_values[pick_n(rng)];
        s.rng_seed = rng();
        const std::string stem = fmt::format("scene_{:04}", i);
        s.image_filename = stem + ".png";
        const std::string image_rel = "images/" + s.image_filename;
        const std::string xml_rel = "annotations/" + stem + ".xml";
        try {
            const Scene scene = generate_scene(s);
            write_image(scene.image, out_dir / image_rel);
            write_xml(scene.annotation, out_dir / xml_rel);
            result.manifest.entries.push_back(ManifestEntry::annotated(image_rel, s.n_objects, xml_rel));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PlacementFailure) throw;
            result.skipped.push_back(image_rel + ": " + e.what());
        }
    }
    write_manifest(result.manifest, out_dir / "manifest.txt");
    return result;
}

std::vector<LabeledCrop> builtin_training_crops(int category_count, int per_category, int sprite_min,
                                                int sprite_max, Rgb background, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> side(sprite_min, sprite_max);
    std::vector<LabeledCrop> crops;
    for (int c = 0; c < category_count; ++c) {
        for (int k = 0; k < per_category; ++k) {
            const int w = side(rng), h = side(rng);
            const Sprite s = render_builtin_sprite(c, w, h, category_count);
            RasterImage crop(w, h, background);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    if (s.mask.at(x, y)) crop.set(x, y, s.pixels.at(x, y));
            crops.push_back({s.label, std::move(crop)});
        }
    }
    return crops;
}

} // namespace autobox
