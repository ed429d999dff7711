#include "autobox/patch_db.hpp"

#include <fstream>

#include <json.hpp>

#include "autobox/annotation.hpp"
#include "autobox/error.hpp"
#include "autobox/image_io.hpp"

namespace autobox {

namespace fs = std::filesystem;

namespace {

constexpr const char* kIndexName = "index.jsonl";

void check_component(const std::string& s, const char* what) {
    if (s.empty() || s == "." || s == ".." || s.find_first_of("/\\\t\r\n") != std::string::npos)
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " '" + s + "' is not a valid path component");
}

} // namespace

PatchDb::PatchDb(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_ / "patches", ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create patch database at " + root_.string());

    const fs::path index = root_ / kIndexName;
    if (!fs::exists(index)) return;
    std::ifstream in(index);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + index.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Record r;
        try {
            const auto j = nlohmann::json::parse(line);
            r.patch_id = j.at("patch_id").get<std::string>();
            r.category = j.at("category").get<std::string>();
            r.source_image = j.at("source_image").get<std::string>();
            r.width = j.at("width").get<int>();
            r.height = j.at("height").get<int>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, index.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (by_id_.contains(r.patch_id))
            throw Error(ErrorCode::ParseError, index.string() + ": duplicate patch-id " + r.patch_id);
        by_id_[r.patch_id] = records_.size();
        records_.push_back(std::move(r));
    }
}

fs::path PatchDb::patch_path(const Record& r) const {
    return root_ / "patches" / r.category / (r.patch_id + ".png");
}

bool PatchDb::add(const std::string& patch_id, const Patch& patch) {
    check_component(patch_id, "patch-id");
    check_component(patch.source_label, "category");
    patch.validate();
    if (contains(patch_id)) return false;

    Record r{patch_id, patch.source_label, patch.source_image, patch.pixels.width(), patch.pixels.height()};
    const fs::path file = patch_path(r);
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + file.parent_path().string());
    fs::path tmp = file;
    tmp += ".tmp.png";
    write_rgba_png(patch.pixels, patch.mask, tmp);
    fs::rename(tmp, file, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot rename into " + file.string());

    nlohmann::ordered_json j;
    j["patch_id"] = r.patch_id;
    j["category"] = r.category;
    j["source_image"] = r.source_image;
    j["width"] = r.width;
    j["height"] = r.height;
    std::ofstream out(root_ / kIndexName, std::ios::app | std::ios::binary);
    out << j.dump() << '\n';
    if (!out) throw Error(ErrorCode::IoFailure, "cannot append to patch index");

    by_id_[r.patch_id] = records_.size();
    records_.push_back(std::move(r));
    return true;
}

Patch PatchDb::get(std::size_t index) const {
    const Record& r = records_.at(index);
    auto [pixels, mask] = read_rgba_png(patch_path(r));
    if (pixels.width() != r.width || pixels.height() != r.height)
        throw Error(ErrorCode::InvariantViolation, "patch " + r.patch_id + " size disagrees with its index record");
    Patch p{std::move(pixels), std::move(mask), r.category, r.source_image};
    p.validate();
    return p;
}

Patch PatchDb::load(const std::string& patch_id) const {
    const auto it = by_id_.find(patch_id);
    if (it == by_id_.end()) throw Error(ErrorCode::InvalidArgument, "unknown patch-id " + patch_id);
    return get(it->second);
}

} // namespace autobox
