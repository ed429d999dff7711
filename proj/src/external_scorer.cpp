#include "autobox/external_scorer.hpp"

#include <charconv>
#include <map>
#include <thread>

#include "autobox/annotation.hpp"
#include "autobox/error.hpp"
#include "autobox/image_io.hpp"

namespace autobox {

namespace fs = std::filesystem;

FileExchangeScorer::FileExchangeScorer(fs::path exchange_dir, std::chrono::milliseconds timeout,
                                       std::chrono::milliseconds poll_interval)
    : dir_(std::move(exchange_dir)), timeout_(timeout), poll_(poll_interval) {}

std::vector<ClassScore> FileExchangeScorer::score(std::span<const RasterImage> crops) const {
    if (crops.empty()) return {};
    const int batch = next_batch_++;
    const fs::path batch_dir = dir_ / ("batch_" + std::to_string(batch));
    std::error_code ec;
    fs::remove_all(batch_dir, ec);
    fs::create_directories(batch_dir / "crops", ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + batch_dir.string());

    std::vector<std::string> ids;
    std::string manifest;
    for (std::size_t i = 0; i < crops.size(); ++i) {
        std::string id = "b" + std::to_string(batch) + "_c" + std::to_string(i);
        const fs::path file = fs::absolute(batch_dir / "crops" / (id + ".png"));
        write_image(crops[i], file);
        manifest += id + "\t" + file.string() + "\n";
        ids.push_back(std::move(id));
    }
    write_file_atomic(batch_dir / kManifestName, manifest);

    const fs::path response = batch_dir / kResponseName;
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    while (!fs::exists(response)) {
        if (std::chrono::steady_clock::now() >= deadline) {
            throw Error(ErrorCode::ScorerProtocolError,
                        "no response for batch " + std::to_string(batch) + " (first crop-id " + ids.front() + ")");
        }
        std::this_thread::sleep_for(poll_);
    }
    return parse_scorer_response(read_file(response), ids);
}

std::vector<ClassScore> parse_scorer_response(std::string_view text, const std::vector<std::string>& crop_ids) {
    std::map<std::string, std::size_t> wanted;
    for (std::size_t i = 0; i < crop_ids.size(); ++i) wanted[crop_ids[i]] = i;
    std::vector<std::optional<ClassScore>> got(crop_ids.size());

    std::size_t pos = 0;
    int lineno = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        const auto t1 = line.find('\t');
        const std::string id(line.substr(0, t1));
        auto fail = [&](const std::string& msg) {
            throw Error(ErrorCode::ScorerProtocolError,
                        "crop-id '" + id + "' (response line " + std::to_string(lineno) + "): " + msg);
        };
        if (t1 == std::string_view::npos) fail("expected 3 tab-separated fields");
        const auto t2 = line.find('\t', t1 + 1);
        if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos)
            fail("expected 3 tab-separated fields");
        const auto it = wanted.find(id);
        if (it == wanted.end()) fail("unknown crop-id");
        if (got[it->second]) fail("duplicate crop-id");

        const std::string label(line.substr(t1 + 1, t2 - t1 - 1));
        if (label.empty()) fail("empty label");
        const std::string_view num = line.substr(t2 + 1);
        double score = 0.0;
        const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), score);
        if (ec != std::errc{} || ptr != num.data() + num.size()) fail("score is not a decimal");
        if (!(score >= 0.0 && score <= 1.0)) fail("score outside [0, 1]");
        got[it->second] = ClassScore{label, score};
    }

    std::vector<ClassScore> out;
    out.reserve(got.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (!got[i]) throw Error(ErrorCode::ScorerProtocolError, "crop-id '" + crop_ids[i] + "': missing from response");
        out.push_back(std::move(*got[i]));
    }
    return out;
}

} // namespace autobox
