#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "autobox/config.hpp"

namespace autobox {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,   // configuration or usage error
    kExitNoOutput = 2, // ran, but produced nothing useful
};

struct CommandContext {
    PipelineConfig config;
    int workers = 0;            // 0: one per hardware thread
    std::ostream* log = nullptr; // per-image structured lines; null silences them
};

/// Writes a seeded synthetic corpus (images/, annotations/, manifest.txt) to out.
int cmd_synth(const CommandContext& ctx, const std::filesystem::path& out);

/// Extraction workflow per manifest entry: optional resize, proposals, the
/// merge loop, confirmation (N > 1 or confirm.force), XML. Writes
/// annotations/, manifest.txt (DROPPED:<reason> for failures),
/// predictions.jsonl and, for the baseline scorer, model.json under out.
int cmd_extract(const CommandContext& ctx, const std::filesystem::path& manifest, const std::filesystem::path& out);

/// Harvests one masked patch per annotated box into the patch database at
/// db. Re-running skips patch-ids already present.
int cmd_harvest(const CommandContext& ctx, const std::filesystem::path& manifest, const std::filesystem::path& db);

/// Writes aug_<mode>_<direction>_<name> images plus copied annotations and a
/// manifest to out, for every configured mode and direction.
int cmd_augment(const CommandContext& ctx, const std::filesystem::path& manifest, const std::filesystem::path& db,
                const std::filesystem::path& out);

/// Scores predictions (JSON lines) against the annotated entries of a
/// ground-truth manifest; writes report.json and report.txt to out.
int cmd_evaluate(const CommandContext& ctx, const std::filesystem::path& predictions,
                 const std::filesystem::path& ground_truth, const std::filesystem::path& out);

/// synth -> extract -> harvest -> augment -> evaluate under out/{corpus,
/// extract, patchdb, augment, eval}.
int cmd_pipeline(const CommandContext& ctx, const std::filesystem::path& out);

/// splitmix64-style mixing used to derive per-item seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) noexcept;

} // namespace autobox
