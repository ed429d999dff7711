#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "autobox/confirm.hpp"

namespace autobox {

/// Batch exchange with an out-of-process classifier through the filesystem.
///
/// For each batch the scorer creates `<exchange>/batch_<k>/` containing
/// `crops/<crop-id>.png` and `manifest.txt` (one `crop-id TAB absolute-path`
/// line per crop), then polls for `response.txt` with one
/// `crop-id TAB label TAB score` line per crop, score a decimal in [0, 1].
/// The external side must create response.txt atomically (write elsewhere,
/// then rename). Missing, duplicate, unknown, or malformed lines raise
/// ScorerProtocolError naming the crop-id; so does a timeout.
class FileExchangeScorer : public Scorer {
public:
    explicit FileExchangeScorer(std::filesystem::path exchange_dir,
                                std::chrono::milliseconds timeout = std::chrono::seconds(60),
                                std::chrono::milliseconds poll_interval = std::chrono::milliseconds(50));

    std::vector<ClassScore> score(std::span<const RasterImage> crops) const override;

    static constexpr std::string_view kManifestName = "manifest.txt";
    static constexpr std::string_view kResponseName = "response.txt";

private:
    std::filesystem::path dir_;
    std::chrono::milliseconds timeout_;
    std::chrono::milliseconds poll_;
    mutable std::atomic<int> next_batch_{0};
};

/// Parses a response file body against the crop-ids that were requested.
/// Result order follows `crop_ids`.
std::vector<ClassScore> parse_scorer_response(std::string_view text, const std::vector<std::string>& crop_ids);

} // namespace autobox
