#include "autobox/commands.hpp"

#include <chrono>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>

#include <fmt/format.h>

#include "autobox/annotation.hpp"
#include "autobox/confirm.hpp"
#include "autobox/error.hpp"
#include "autobox/external_scorer.hpp"
#include "autobox/image_io.hpp"
#include "autobox/image_ops.hpp"
#include "autobox/metrics.hpp"
#include "autobox/parallel.hpp"
#include "autobox/patch_db.hpp"

namespace autobox {

namespace fs = std::filesystem;

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(mix(base) ^ a) ^ b) ^ c);
}

namespace {

using Clock = std::chrono::steady_clock;

class EventLog {
public:
    explicit EventLog(std::ostream* out) : out_(out) {}

    void write(std::string_view stage, std::string_view image, std::string_view outcome, Clock::time_point start,
               std::string_view detail = {}) {
        if (out_ == nullptr) return;
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        std::string line = fmt::format("stage={} image={} outcome={} ms={:.1f}", stage, image, outcome, ms);
        if (!detail.empty()) line += fmt::format(" detail=\"{}\"", detail);
        line += '\n';
        std::lock_guard lock(mutex_);
        *out_ << line << std::flush;
    }

private:
    std::ostream* out_;
    std::mutex mutex_;
};

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::NoGroundTruth:
    case ErrorCode::EmptyPatchDb:
    case ErrorCode::PlacementFailure: return kExitNoOutput;
    default: return kExitConfig;
    }
}

template <typename Fn>
int guarded(std::string_view command, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        std::cerr << "autobox " << command << ": " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "autobox " << command << ": " << e.what() << '\n';
        return kExitConfig;
    }
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
}

std::string relative_to(const fs::path& dir, const fs::path& target) {
    const fs::path d = fs::absolute(dir).lexically_normal();
    const fs::path t = fs::absolute(target).lexically_normal();
    const fs::path rel = t.lexically_relative(d);
    return (rel.empty() ? t : rel).generic_string();
}

DatasetManifest read_manifest_or_config_error(const fs::path& path) {
    try {
        return read_manifest(path);
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
}

void make_dirs(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + p.string());
}

// Unique file stems per manifest entry so outputs never collide.
std::vector<std::string> unique_stems(const DatasetManifest& m) {
    std::vector<std::string> stems;
    std::set<std::string> used;
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        std::string stem = fs::path(m.entries[i].image_path).stem().string();
        if (!used.insert(stem).second) {
            stem += "_" + std::to_string(i);
            used.insert(stem);
        }
        stems.push_back(std::move(stem));
    }
    return stems;
}

struct ScorerBundle {
    std::unique_ptr<Scorer> scorer;
    ConfirmPolicy policy;
};

ScorerBundle make_scorer(const PipelineConfig& cfg, const fs::path& out) {
    ScorerBundle b;
    b.policy.score_threshold = cfg.confirm.score_threshold;
    b.policy.valid_labels.insert(cfg.confirm.valid_labels.begin(), cfg.confirm.valid_labels.end());
    if (cfg.confirm.scorer == "external") {
        b.scorer = std::make_unique<FileExchangeScorer>(fs::path(cfg.confirm.exchange_dir),
                                                        std::chrono::milliseconds(cfg.confirm.timeout_ms));
        return b;
    }

    std::unique_ptr<HistogramModel> model;
    if (!cfg.confirm.model_path.empty()) {
        model = std::make_unique<HistogramModel>(HistogramModel::load(cfg.confirm.model_path));
    } else {
        const auto& scene = cfg.synth.scene;
        const auto crops = builtin_training_crops(scene.builtin_categories, cfg.confirm.train_per_category,
                                                  scene.sprite_min, scene.sprite_max, scene.background,
                                                  derive_seed(cfg.seed, 0x747261696eULL));
        model = std::make_unique<HistogramModel>(train_baseline(crops, {}, cfg.confirm.temperature));
    }
    model->save(out / "model.json");
    if (b.policy.valid_labels.empty()) b.policy.valid_labels.insert(model->labels().begin(), model->labels().end());
    b.scorer = std::move(model);
    return b;
}

} // namespace

int cmd_synth(const CommandContext& ctx, const fs::path& out) {
    return guarded("synth", [&] {
        ctx.config.validate();
        CorpusSpec spec = ctx.config.synth;
        spec.seed = ctx.config.seed;
        const auto start = Clock::now();
        const CorpusResult result = generate_corpus(spec, out);
        EventLog log(ctx.log);
        for (const auto& e : result.manifest.entries) log.write("synth", e.image_path, "ok", start);
        for (const auto& s : result.skipped) log.write("synth", s.substr(0, s.find(':')), "skipped", start, s);
        return result.manifest.entries.empty() && spec.count > 0 ? kExitNoOutput : kExitOk;
    });
}

int cmd_extract(const CommandContext& ctx, const fs::path& manifest_path, const fs::path& out) {
    return guarded("extract", [&] {
        const PipelineConfig& cfg = ctx.config;
        cfg.validate();
        const DatasetManifest input = read_manifest_or_config_error(manifest_path);
        const fs::path base = manifest_path.parent_path();
        make_dirs(out / "annotations");
        if (cfg.resize) make_dirs(out / "images");

        const ScorerBundle scoring = make_scorer(cfg, out);
        const auto stems = unique_stems(input);

        struct Outcome {
            ManifestEntry entry;
            std::vector<Detection> detections;
        };
        std::vector<Outcome> outcomes(input.entries.size());
        EventLog log(ctx.log);

        parallel_for(input.entries.size(), ctx.workers, [&](std::size_t i) {
            const auto start = Clock::now();
            const ManifestEntry& in = input.entries[i];
            const fs::path image_abs = resolve(base, in.image_path);
            std::string image_ref = relative_to(out, image_abs);
            try {
                RasterImage img = read_image(image_abs);
                if (cfg.resize) {
                    RasterImage small = resize_preserve_aspect(img, cfg.resize_long_side);
                    if (small.width() != img.width() || small.height() != img.height()) {
                        const std::string name = image_abs.filename().string();
                        write_image(small, out / "images" / name);
                        image_ref = "images/" + name;
                        img = std::move(small);
                    }
                }
                const ExtractResult extracted = extract(img, in.n_objects, cfg.extract, cfg.proposal);

                Annotation ann;
                ann.image_filename = fs::path(image_ref).filename().string();
                ann.image_width = img.width();
                ann.image_height = img.height();
                std::vector<double> scores;
                if (in.n_objects > 1 || cfg.confirm.force) {
                    const ConfirmResult cr = confirm_boxes(img, extracted.boxes, *scoring.scorer, scoring.policy);
                    if (cr.accepted.empty() || (!cr.rejected.empty() && !cfg.confirm.keep_partial)) {
                        const auto& first = cr.rejected.front();
                        outcomes[i].entry = ManifestEntry::dropped(image_ref, in.n_objects,
                                                                   std::string(to_string(first.reason)));
                        log.write("extract", image_ref, "dropped", start,
                                  fmt::format("{} rejected of {}", cr.rejected.size(), extracted.boxes.size()));
                        return;
                    }
                    for (const auto& a : cr.accepted) {
                        ann.objects.push_back({a.cls.label, a.box});
                        scores.push_back(a.cls.score);
                    }
                } else {
                    std::vector<RasterImage> crops;
                    for (const auto& b : extracted.boxes) crops.push_back(crop(img, b));
                    const auto cls = scoring.scorer->score(crops);
                    for (std::size_t k = 0; k < extracted.boxes.size(); ++k) {
                        ann.objects.push_back({cls.at(k).label, extracted.boxes[k]});
                        scores.push_back(cls.at(k).score);
                    }
                }

                const std::string xml_rel = "annotations/" + stems[i] + ".xml";
                write_xml(ann, out / xml_rel);
                outcomes[i].entry = ManifestEntry::annotated(image_ref, in.n_objects, xml_rel);
                for (std::size_t k = 0; k < ann.objects.size(); ++k) {
                    outcomes[i].detections.push_back(
                        {ann.image_filename, ann.objects[k].label, ann.objects[k].box, scores[k]});
                }
                log.write("extract", image_ref, "ok", start,
                          fmt::format("{} boxes, {} passes", ann.objects.size(), extracted.iterations_used));
            } catch (const Error& e) {
                outcomes[i].entry = ManifestEntry::dropped(image_ref, in.n_objects, std::string(to_string(e.code())));
                log.write("extract", image_ref, "dropped", start, e.what());
            }
        });

        DatasetManifest result;
        std::vector<Detection> detections;
        int written = 0;
        for (auto& o : outcomes) {
            if (o.entry.status == EntryStatus::Annotated) ++written;
            result.entries.push_back(std::move(o.entry));
            detections.insert(detections.end(), o.detections.begin(), o.detections.end());
        }
        write_manifest(result, out / "manifest.txt");
        write_file_atomic(out / "predictions.jsonl", to_jsonl(detections));
        return written > 0 ? kExitOk : kExitNoOutput;
    });
}

int cmd_harvest(const CommandContext& ctx, const fs::path& manifest_path, const fs::path& db_dir) {
    return guarded("harvest", [&] {
        const PipelineConfig& cfg = ctx.config;
        cfg.validate();
        const DatasetManifest input = read_manifest_or_config_error(manifest_path);
        const fs::path base = manifest_path.parent_path();
        PatchDb db(db_dir);
        EventLog log(ctx.log);

        struct Harvested {
            std::vector<std::pair<std::string, Patch>> patches;
        };
        std::vector<Harvested> found(input.entries.size());
        parallel_for(input.entries.size(), ctx.workers, [&](std::size_t i) {
            const ManifestEntry& e = input.entries[i];
            if (e.status != EntryStatus::Annotated) return;
            const auto start = Clock::now();
            try {
                const RasterImage img = read_image(resolve(base, e.image_path));
                const Annotation ann = read_xml(resolve(base, e.detail));
                const std::string stem = fs::path(ann.image_filename).stem().string();
                int kept = 0, skipped = 0, present = 0;
                for (const auto& o : ann.objects) {
                    const std::string id =
                        fmt::format("{}_{}_{}_{}_{}", stem, o.box.xmin, o.box.ymin, o.box.width, o.box.height);
                    if (db.contains(id)) {
                        ++present;
                        continue;
                    }
                    try {
                        found[i].patches.emplace_back(
                            id, harvest_patch(img, o.box, o.label, ann.image_filename,
                                              BackgroundModel{std::nullopt, cfg.occlude.tolerance}));
                        ++kept;
                    } catch (const Error& err) {
                        if (err.code() != ErrorCode::EmptyForeground) throw;
                        ++skipped;
                        log.write("harvest", e.image_path, "skipped", start, fmt::format("{}: {}", id, err.what()));
                    }
                }
                log.write("harvest", e.image_path, "ok", start,
                          fmt::format("{} new, {} present, {} skipped", kept, present, skipped));
            } catch (const Error& err) {
                log.write("harvest", e.image_path, "failed", start, err.what());
            }
        });

        for (const auto& h : found)
            for (const auto& [id, patch] : h.patches) db.add(id, patch);
        return db.size() > 0 ? kExitOk : kExitNoOutput;
    });
}

int cmd_augment(const CommandContext& ctx, const fs::path& manifest_path, const fs::path& db_dir,
                const fs::path& out) {
    return guarded("augment", [&] {
        const PipelineConfig& cfg = ctx.config;
        cfg.validate();
        const DatasetManifest input = read_manifest_or_config_error(manifest_path);
        const fs::path base = manifest_path.parent_path();

        const bool needs_patches = std::find(cfg.occlude.modes.begin(), cfg.occlude.modes.end(),
                                             OcclusionMode::Patch) != cfg.occlude.modes.end();
        std::optional<PatchDb> db;
        if (fs::exists(db_dir)) db.emplace(db_dir);
        if (needs_patches && (!db || db->size() == 0))
            throw Error(ErrorCode::EmptyPatchDb, "patch mode needs a non-empty patch database at " + db_dir.string());

        make_dirs(out / "images");
        make_dirs(out / "annotations");
        EventLog log(ctx.log);

        std::vector<std::vector<ManifestEntry>> produced(input.entries.size());
        parallel_for(input.entries.size(), ctx.workers, [&](std::size_t i) {
            const ManifestEntry& e = input.entries[i];
            if (e.status != EntryStatus::Annotated) return;
            const auto start = Clock::now();
            try {
                const RasterImage img = read_image(resolve(base, e.image_path));
                const Annotation ann = read_xml(resolve(base, e.detail));
                const std::string stem = fs::path(e.detail).stem().string();
                for (const auto mode : cfg.occlude.modes) {
                    for (const auto dir : cfg.occlude.directions) {
                        const std::string prefix = fmt::format("aug_{}_{}_", to_string(mode), to_string(dir));
                        std::mt19937_64 rng(derive_seed(cfg.seed, i, static_cast<std::uint64_t>(mode),
                                                        static_cast<std::uint64_t>(dir)));
                        std::uniform_real_distribution<double> cover(cfg.occlude.coverage_min, cfg.occlude.coverage_max);
                        OcclusionSpec spec{mode, dir, 0.0, 0};
                        spec.coverage = std::min(1.0, cover(rng));
                        spec.rng_seed = rng();
                        try {
                            const RasterImage aug = simulate_occlusion(img, ann, spec, db ? &*db : nullptr);
                            Annotation copy = ann;
                            copy.image_filename = prefix + ann.image_filename;
                            const std::string image_rel = "images/" + copy.image_filename;
                            const std::string xml_rel = "annotations/" + prefix + stem + ".xml";
                            write_image(aug, out / image_rel);
                            write_xml(copy, out / xml_rel);
                            produced[i].push_back(ManifestEntry::annotated(image_rel, e.n_objects, xml_rel));
                        } catch (const Error& err) {
                            if (err.code() != ErrorCode::NoOverlap) throw;
                            log.write("augment", e.image_path, "skipped", start, err.what());
                        }
                    }
                }
                log.write("augment", e.image_path, "ok", start, fmt::format("{} variants", produced[i].size()));
            } catch (const Error& err) {
                log.write("augment", e.image_path, "failed", start, err.what());
            }
        });

        DatasetManifest result;
        for (auto& p : produced)
            for (auto& entry : p) result.entries.push_back(std::move(entry));
        write_manifest(result, out / "manifest.txt");
        return result.entries.empty() ? kExitNoOutput : kExitOk;
    });
}

int cmd_evaluate(const CommandContext& ctx, const fs::path& predictions, const fs::path& ground_truth,
                 const fs::path& out) {
    return guarded("evaluate", [&] {
        const PipelineConfig& cfg = ctx.config;
        cfg.validate();
        std::vector<Detection> dets;
        std::vector<Annotation> gts;
        try {
            dets = read_detections_jsonl(predictions);
            const DatasetManifest m = read_manifest(ground_truth);
            for (const auto& e : m.entries) {
                if (e.status == EntryStatus::Annotated) gts.push_back(read_xml(resolve(ground_truth.parent_path(), e.detail)));
            }
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigError, e.what());
        }
        const MetricsReport report = compute_report(dets, gts, cfg.eval.iou_threshold, cfg.eval.score_suppress);
        make_dirs(out);
        write_file_atomic(out / "report.json", report_json(report));
        const std::string table = report_table(report);
        write_file_atomic(out / "report.txt", table);
        if (ctx.log != nullptr) *ctx.log << table;
        return kExitOk;
    });
}

int cmd_pipeline(const CommandContext& ctx, const fs::path& out) {
    if (const int rc = cmd_synth(ctx, out / "corpus"); rc != kExitOk) return rc;
    if (const int rc = cmd_extract(ctx, out / "corpus" / "manifest.txt", out / "extract"); rc != kExitOk) return rc;
    if (const int rc = cmd_harvest(ctx, out / "extract" / "manifest.txt", out / "patchdb"); rc != kExitOk) return rc;
    if (const int rc = cmd_augment(ctx, out / "extract" / "manifest.txt", out / "patchdb", out / "augment");
        rc != kExitOk)
        return rc;
    return cmd_evaluate(ctx, out / "extract" / "predictions.jsonl", out / "corpus" / "manifest.txt", out / "eval");
}

} // namespace autobox
