#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "autobox/box.hpp"

namespace autobox {

struct LabeledBox {
    std::string label;
    Box box;

    friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

struct Annotation {
    std::string image_filename;
    int image_width = 0;
    int image_height = 0;
    std::vector<LabeledBox> objects;

    /// Throws InvariantViolation: positive size, every box inside the image,
    /// labels non-empty without surrounding whitespace or control characters.
    void validate() const;

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// VOC-style document. Boxes are written 1-based inclusive:
/// xmin+1, ymin+1, xmin+width, ymin+height.
std::string to_xml(const Annotation& a);
Annotation parse_xml(std::string_view text);

/// Writes through a temporary file and an atomic rename.
void write_xml(const Annotation& a, const std::filesystem::path& path);
Annotation read_xml(const std::filesystem::path& path);

enum class EntryStatus { Pending, Annotated, Dropped };

/// One manifest line. `detail` holds the annotation path (Annotated) or the
/// drop reason (Dropped); it is empty for Pending entries.
struct ManifestEntry {
    std::string image_path;
    int n_objects = 1;
    EntryStatus status = EntryStatus::Pending;
    std::string detail;

    static ManifestEntry pending(std::string image, int n);
    static ManifestEntry annotated(std::string image, int n, std::string annotation);
    static ManifestEntry dropped(std::string image, int n, std::string reason);

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Plain text, one entry per line:
///   <image-path> TAB <N> TAB <annotation-path | DROPPED:<reason>>
/// A line with only the first two fields is a pending entry.
struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

std::string to_text(const DatasetManifest& m);
/// Throws ParseError (bad line, N < 1) or DuplicatePath.
DatasetManifest parse_manifest(std::string_view text);

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Shared by the XML, manifest, and patch-index writers.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

} // namespace autobox
