#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "autobox/occlusion.hpp"

namespace autobox {

/// Directory-backed patch store:
///   <root>/patches/<category>/<patch-id>.png   RGBA, alpha 255 = mask set
///   <root>/index.jsonl                          one record per patch, append-only
/// The index is the source of truth for enumeration. Any number of readers;
/// one writer at a time.
class PatchDb : public PatchSource {
public:
    struct Record {
        std::string patch_id;
        std::string category;
        std::string source_image;
        int width = 0;
        int height = 0;

        friend bool operator==(const Record&, const Record&) = default;
    };

    /// Opens (creating when missing) the store at root and loads its index.
    explicit PatchDb(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }
    const std::vector<Record>& records() const noexcept { return records_; }
    bool contains(const std::string& patch_id) const { return by_id_.contains(patch_id); }

    /// Stores the patch and appends its index record. Returns false, writing
    /// nothing, when patch_id already exists.
    bool add(const std::string& patch_id, const Patch& patch);

    Patch load(const std::string& patch_id) const;

    std::size_t size() const override { return records_.size(); }
    Patch get(std::size_t index) const override;

    std::filesystem::path patch_path(const Record& r) const;

private:
    std::filesystem::path root_;
    std::vector<Record> records_;
    std::map<std::string, std::size_t> by_id_;
};

} // namespace autobox
