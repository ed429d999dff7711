#include "autobox/config.hpp"

#include <charconv>
#include <functional>
#include <map>

#include "autobox/annotation.hpp"
#include "autobox/error.hpp"

namespace autobox {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
    throw Error(ErrorCode::ConfigError,
                std::string(key) + " = '" + std::string(value) + "': expected " + std::string(want));
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "a number");
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, v, "true or false");
}

std::vector<std::string_view> split_list(std::string_view v) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        const auto comma = v.find(',', start);
        const auto item = trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

using Setter = std::function<void(PipelineConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"propose.scale", [](auto& c, auto k, auto v) { c.proposal.segmentation.scale = parse_number<double>(k, v); }},
        {"propose.sigma", [](auto& c, auto k, auto v) { c.proposal.segmentation.sigma = parse_number<double>(k, v); }},
        {"propose.min_segment_size",
         [](auto& c, auto k, auto v) { c.proposal.segmentation.min_segment_size = parse_number<int>(k, v); }},
        {"propose.similarity",
         [](auto& c, auto k, auto v) {
             SimilarityWeights w{false, false, false, false};
             for (const auto item : split_list(v)) {
                 if (item == "color") w.color = true;
                 else if (item == "texture") w.texture = true;
                 else if (item == "size") w.size = true;
                 else if (item == "fill") w.fill = true;
                 else bad_value(k, v, "a list of color, texture, size, fill");
             }
             c.proposal.weights = w;
         }},
        {"extract.initial_iou_threshold",
         [](auto& c, auto k, auto v) { c.extract.initial_iou_threshold = parse_number<double>(k, v); }},
        {"extract.area_min", [](auto& c, auto k, auto v) { c.extract.area_min = parse_number<long long>(k, v); }},
        {"extract.aspect_max", [](auto& c, auto k, auto v) { c.extract.aspect_max = parse_number<double>(k, v); }},
        {"extract.iou_threshold_max",
         [](auto& c, auto k, auto v) { c.extract.iou_threshold_max = parse_number<double>(k, v); }},
        {"extract.max_iterations", [](auto& c, auto k, auto v) { c.extract.max_iterations = parse_number<int>(k, v); }},
        {"extract.merge_mode", [](auto& c, auto, auto v) { c.extract.merge_mode = parse_merge_mode(v); }},
        {"extract.area_max_fraction",
         [](auto& c, auto k, auto v) { c.extract.area_max_fraction = parse_number<double>(k, v); }},
        {"extract.resize", [](auto& c, auto k, auto v) { c.resize = parse_bool(k, v); }},
        {"extract.resize_long_side", [](auto& c, auto k, auto v) { c.resize_long_side = parse_number<int>(k, v); }},
        {"confirm.score_threshold",
         [](auto& c, auto k, auto v) { c.confirm.score_threshold = parse_number<double>(k, v); }},
        {"confirm.valid_labels",
         [](auto& c, auto, auto v) {
             c.confirm.valid_labels.clear();
             for (const auto item : split_list(v)) c.confirm.valid_labels.emplace_back(item);
         }},
        {"confirm.scorer",
         [](auto& c, auto k, auto v) {
             if (v != "baseline" && v != "external") bad_value(k, v, "baseline or external");
             c.confirm.scorer = std::string(v);
         }},
        {"confirm.model", [](auto& c, auto, auto v) { c.confirm.model_path = std::string(v); }},
        {"confirm.exchange_dir", [](auto& c, auto, auto v) { c.confirm.exchange_dir = std::string(v); }},
        {"confirm.timeout_ms", [](auto& c, auto k, auto v) { c.confirm.timeout_ms = parse_number<int>(k, v); }},
        {"confirm.force", [](auto& c, auto k, auto v) { c.confirm.force = parse_bool(k, v); }},
        {"confirm.keep_partial", [](auto& c, auto k, auto v) { c.confirm.keep_partial = parse_bool(k, v); }},
        {"confirm.temperature", [](auto& c, auto k, auto v) { c.confirm.temperature = parse_number<double>(k, v); }},
        {"confirm.train_per_category",
         [](auto& c, auto k, auto v) { c.confirm.train_per_category = parse_number<int>(k, v); }},
        {"occlude.modes",
         [](auto& c, auto, auto v) {
             c.occlude.modes.clear();
             for (const auto item : split_list(v)) c.occlude.modes.push_back(parse_occlusion_mode(item));
         }},
        {"occlude.directions",
         [](auto& c, auto, auto v) {
             c.occlude.directions.clear();
             for (const auto item : split_list(v)) c.occlude.directions.push_back(parse_direction(item));
         }},
        {"occlude.coverage_min", [](auto& c, auto k, auto v) { c.occlude.coverage_min = parse_number<double>(k, v); }},
        {"occlude.coverage_max", [](auto& c, auto k, auto v) { c.occlude.coverage_max = parse_number<double>(k, v); }},
        {"occlude.tolerance", [](auto& c, auto k, auto v) { c.occlude.tolerance = parse_number<int>(k, v); }},
        {"eval.iou_threshold", [](auto& c, auto k, auto v) { c.eval.iou_threshold = parse_number<double>(k, v); }},
        {"eval.score_suppress",
         [](auto& c, auto k, auto v) {
             if (v == "off") c.eval.score_suppress.reset();
             else c.eval.score_suppress = parse_number<double>(k, v);
         }},
        {"synth.count", [](auto& c, auto k, auto v) { c.synth.count = parse_number<int>(k, v); }},
        {"synth.width", [](auto& c, auto k, auto v) { c.synth.scene.canvas_width = parse_number<int>(k, v); }},
        {"synth.height", [](auto& c, auto k, auto v) { c.synth.scene.canvas_height = parse_number<int>(k, v); }},
        {"synth.n_values",
         [](auto& c, auto k, auto v) {
             c.synth.n_values.clear();
             for (const auto item : split_list(v)) c.synth.n_values.push_back(parse_number<int>(k, item));
         }},
        {"synth.min_gap", [](auto& c, auto k, auto v) { c.synth.scene.min_gap = parse_number<int>(k, v); }},
        {"synth.noise", [](auto& c, auto k, auto v) { c.synth.scene.noise_amplitude = parse_number<int>(k, v); }},
        {"synth.background",
         [](auto& c, auto k, auto v) {
             const auto parts = split_list(v);
             if (parts.size() != 3) bad_value(k, v, "r,g,b");
             int rgb[3];
             for (int i = 0; i < 3; ++i) {
                 rgb[i] = parse_number<int>(k, parts[i]);
                 if (rgb[i] < 0 || rgb[i] > 255) bad_value(k, v, "channels in [0, 255]");
             }
             c.synth.scene.background = {static_cast<std::uint8_t>(rgb[0]), static_cast<std::uint8_t>(rgb[1]),
                                         static_cast<std::uint8_t>(rgb[2])};
         }},
        {"synth.sprite_min", [](auto& c, auto k, auto v) { c.synth.scene.sprite_min = parse_number<int>(k, v); }},
        {"synth.sprite_max", [](auto& c, auto k, auto v) { c.synth.scene.sprite_max = parse_number<int>(k, v); }},
        {"synth.categories",
         [](auto& c, auto k, auto v) { c.synth.scene.builtin_categories = parse_number<int>(k, v); }},
        {"seed", [](auto& c, auto k, auto v) { c.seed = parse_number<std::uint64_t>(k, v); }},
    };
    return table;
}

} // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw Error(ErrorCode::ConfigError, "unknown config key '" + std::string(key) + "'");
    it->second(*this, key, value);
}

std::vector<std::string> PipelineConfig::keys() {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
}

void PipelineConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); };
    if (proposal.segmentation.scale <= 0.0) fail("propose.scale must be positive");
    if (proposal.segmentation.sigma < 0.0) fail("propose.sigma must be >= 0");
    if (proposal.segmentation.min_segment_size < 1) fail("propose.min_segment_size must be >= 1");
    const auto& w = proposal.weights;
    if (!(w.color || w.texture || w.size || w.fill)) fail("propose.similarity must enable at least one component");
    extract.validate();
    if (resize_long_side < 1) fail("extract.resize_long_side must be >= 1");

    if (!(confirm.score_threshold >= 0.0 && confirm.score_threshold <= 1.0))
        fail("confirm.score_threshold must lie in [0, 1]");
    if (confirm.scorer == "external" && confirm.exchange_dir.empty())
        fail("confirm.exchange_dir is required with confirm.scorer = external");
    if (confirm.scorer == "external" && confirm.valid_labels.empty())
        fail("confirm.valid_labels is required with confirm.scorer = external");
    if (confirm.timeout_ms < 1) fail("confirm.timeout_ms must be >= 1");
    if (!(confirm.temperature > 0.0)) fail("confirm.temperature must be positive");
    if (confirm.train_per_category < 1) fail("confirm.train_per_category must be >= 1");

    if (occlude.modes.empty()) fail("occlude.modes must not be empty");
    if (occlude.directions.empty()) fail("occlude.directions must not be empty");
    if (!(occlude.coverage_min > 0.0 && occlude.coverage_min <= occlude.coverage_max && occlude.coverage_max <= 1.0))
        fail("occlude coverage range must satisfy 0 < coverage_min <= coverage_max <= 1");
    if (occlude.tolerance < 0 || occlude.tolerance > 255) fail("occlude.tolerance must lie in [0, 255]");

    if (!(eval.iou_threshold > 0.0 && eval.iou_threshold < 1.0)) fail("eval.iou_threshold must lie in (0, 1)");
    if (eval.score_suppress && !(*eval.score_suppress >= 0.0 && *eval.score_suppress <= 1.0))
        fail("eval.score_suppress must lie in [0, 1]");

    if (synth.count < 0) fail("synth.count must be >= 0");
    if (synth.n_values.empty()) fail("synth.n_values must not be empty");
    for (const int n : synth.n_values)
        if (n < 1) fail("synth.n_values entries must be >= 1");
    SceneSpec probe = synth.scene;
    probe.n_objects = 1;
    probe.validate();
}

void apply_override(PipelineConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw Error(ErrorCode::ConfigError, "override '" + std::string(assignment) + "' is not key=value");
    cfg.set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

PipelineConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
    PipelineConfig cfg;
    std::size_t pos = 0;
    int lineno = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::ConfigError, "config line " + std::to_string(lineno) + " is not key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    for (const auto& o : overrides) apply_override(cfg, o);
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    return parse_config(text, overrides);
}

} // namespace autobox
