#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autobox/extract.hpp"
#include "autobox/occlusion.hpp"
#include "autobox/selective_search.hpp"
#include "autobox/synth.hpp"

namespace autobox {

struct ConfirmSettings {
    double score_threshold = 0.8;
    std::vector<std::string> valid_labels; // empty: every label the baseline model knows
    std::string scorer = "baseline";       // baseline | external
    std::string model_path;                // baseline: load instead of training
    std::string exchange_dir;              // external: exchange directory
    int timeout_ms = 60000;
    bool force = false;                    // confirm N == 1 images too
    bool keep_partial = false;             // keep accepted boxes of a partly rejected image
    double temperature = 10.0;
    int train_per_category = 20;
};

struct OccludeSettings {
    std::vector<OcclusionMode> modes{OcclusionMode::Black, OcclusionMode::Patch};
    std::vector<Direction> directions{Direction::Left, Direction::Right, Direction::Up, Direction::Down};
    double coverage_min = 0.2;
    double coverage_max = 0.5;
    int tolerance = 30;
};

struct EvalSettings {
    double iou_threshold = 0.5;
    std::optional<double> score_suppress;
};

/// Every tunable of the pipeline, addressed by namespaced keys such as
/// `extract.area_min` or `synth.count`.
struct PipelineConfig {
    ProposalConfig proposal;
    ExtractConfig extract;
    bool resize = false;
    int resize_long_side = 640;
    ConfirmSettings confirm;
    OccludeSettings occlude;
    EvalSettings eval;
    CorpusSpec synth;
    std::uint64_t seed = 0;

    /// Assigns one key. Throws ConfigError for unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    /// Throws ConfigError when any module invariant fails.
    void validate() const;

    static std::vector<std::string> keys();
};

/// `key = value` lines; `#` starts a comment. Validated before returning.
PipelineConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
PipelineConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Applies one `key=value` override.
void apply_override(PipelineConfig& cfg, std::string_view assignment);

} // namespace autobox
