#include "autobox/annotation.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "autobox/error.hpp"

namespace autobox {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

bool has_bad_label_chars(const std::string& s) {
    if (s.empty()) return true;
    if (std::isspace(static_cast<unsigned char>(s.front())) || std::isspace(static_cast<unsigned char>(s.back())))
        return true;
    for (const unsigned char ch : s) {
        if (ch < 0x20 || ch == 0x7f) return true;
    }
    return false;
}

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += ch;
        }
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

int parse_int(std::string_view raw, std::string_view what) {
    const std::string s = trim(raw);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw Error(ErrorCode::ParseError, "field <" + std::string(what) + "> is not an integer: '" + s + "'");
    }
    return v;
}

const pt::ptree& child(const pt::ptree& node, const char* name) {
    const auto it = node.find(name);
    if (it == node.not_found()) throw Error(ErrorCode::ParseError, std::string("missing <") + name + ">");
    return it->second;
}

} // namespace

void Annotation::validate() const {
    auto fail = [&](const std::string& msg) {
        throw Error(ErrorCode::InvariantViolation, image_filename + ": " + msg);
    };
    if (image_filename.empty()) fail("empty image filename");
    if (image_width < 1 || image_height < 1) fail("image size must be positive");
    for (const auto& o : objects) {
        if (has_bad_label_chars(o.label)) fail("invalid label '" + o.label + "'");
        if (!o.box.fits(image_width, image_height)) {
            std::ostringstream msg;
            msg << "box " << o.box << " exceeds image " << image_width << "x" << image_height;
            fail(msg.str());
        }
    }
}

std::string to_xml(const Annotation& a) {
    a.validate();
    std::ostringstream os;
    os << "<annotation>\n";
    os << "\t<filename>" << escape(a.image_filename) << "</filename>\n";
    os << "\t<size>\n";
    os << "\t\t<width>" << a.image_width << "</width>\n";
    os << "\t\t<height>" << a.image_height << "</height>\n";
    os << "\t\t<depth>3</depth>\n";
    os << "\t</size>\n";
    for (const auto& o : a.objects) {
        os << "\t<object>\n";
        os << "\t\t<name>" << escape(o.label) << "</name>\n";
        os << "\t\t<bndbox>\n";
        os << "\t\t\t<xmin>" << o.box.xmin + 1 << "</xmin>\n";
        os << "\t\t\t<ymin>" << o.box.ymin + 1 << "</ymin>\n";
        os << "\t\t\t<xmax>" << o.box.xmax() << "</xmax>\n";
        os << "\t\t\t<ymax>" << o.box.ymax() << "</ymax>\n";
        os << "\t\t</bndbox>\n";
        os << "\t</object>\n";
    }
    os << "</annotation>\n";
    return os.str();
}

Annotation parse_xml(std::string_view text) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }

    Annotation a;
    const auto& root = child(tree, "annotation");
    a.image_filename = trim(child(root, "filename").data());
    const auto& size = child(root, "size");
    a.image_width = parse_int(child(size, "width").data(), "width");
    a.image_height = parse_int(child(size, "height").data(), "height");

    for (const auto& [name, node] : root) {
        if (name != "object") continue;
        LabeledBox o;
        o.label = trim(child(node, "name").data());
        const auto& bb = child(node, "bndbox");
        const int x0 = parse_int(child(bb, "xmin").data(), "xmin");
        const int y0 = parse_int(child(bb, "ymin").data(), "ymin");
        const int x1 = parse_int(child(bb, "xmax").data(), "xmax");
        const int y1 = parse_int(child(bb, "ymax").data(), "ymax");
        if (x0 < 1 || y0 < 1 || x1 < x0 || y1 < y0) {
            throw Error(ErrorCode::InvariantViolation,
                        "bndbox " + std::to_string(x0) + "," + std::to_string(y0) + "," + std::to_string(x1) +
                            "," + std::to_string(y1) + " is not a positive 1-based box");
        }
        o.box = {x0 - 1, y0 - 1, x1 - x0 + 1, y1 - y0 + 1};
        a.objects.push_back(std::move(o));
    }
    a.validate();
    return a;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    std::ostringstream suffix;
    suffix << ".tmp." << std::this_thread::get_id();
    fs::path tmp = path;
    tmp += suffix.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoFailure, "cannot rename into " + path.string());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_xml(const Annotation& a, const fs::path& path) { write_file_atomic(path, to_xml(a)); }

Annotation read_xml(const fs::path& path) { return parse_xml(read_file(path)); }

ManifestEntry ManifestEntry::pending(std::string image, int n) {
    return {std::move(image), n, EntryStatus::Pending, {}};
}
ManifestEntry ManifestEntry::annotated(std::string image, int n, std::string annotation) {
    return {std::move(image), n, EntryStatus::Annotated, std::move(annotation)};
}
ManifestEntry ManifestEntry::dropped(std::string image, int n, std::string reason) {
    return {std::move(image), n, EntryStatus::Dropped, std::move(reason)};
}

namespace {

constexpr std::string_view kDroppedPrefix = "DROPPED:";

bool bad_field(std::string_view s) {
    return s.find_first_of("\t\r\n") != std::string_view::npos;
}

} // namespace

std::string to_text(const DatasetManifest& m) {
    std::string out;
    std::set<std::string> seen;
    for (const auto& e : m.entries) {
        if (e.image_path.empty() || bad_field(e.image_path) || bad_field(e.detail) || e.n_objects < 1 ||
            (e.status == EntryStatus::Annotated && (e.detail.empty() || e.detail.starts_with(kDroppedPrefix))) ||
            (e.status == EntryStatus::Pending && !e.detail.empty())) {
            throw Error(ErrorCode::InvariantViolation, "manifest entry '" + e.image_path + "' cannot be encoded");
        }
        if (!seen.insert(e.image_path).second)
            throw Error(ErrorCode::DuplicatePath, "manifest lists '" + e.image_path + "' twice");
        out += e.image_path;
        out += '\t';
        out += std::to_string(e.n_objects);
        switch (e.status) {
        case EntryStatus::Pending: break;
        case EntryStatus::Annotated:
            out += '\t';
            out += e.detail;
            break;
        case EntryStatus::Dropped:
            out += '\t';
            out += kDroppedPrefix;
            out += e.detail;
            break;
        }
        out += '\n';
    }
    return out;
}

DatasetManifest parse_manifest(std::string_view text) {
    DatasetManifest m;
    std::set<std::string> seen;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string_view::npos ? line.npos : tab - start));
            if (tab == std::string_view::npos) break;
            start = tab + 1;
        }
        auto fail = [&](const std::string& msg) {
            throw Error(ErrorCode::ParseError, "manifest line " + std::to_string(lineno) + ": " + msg);
        };
        if (fields.size() < 2 || fields.size() > 3) fail("expected 2 or 3 tab-separated fields");
        if (fields[0].empty()) fail("empty image path");

        int n = 0;
        const auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), n);
        if (ec != std::errc{} || ptr != fields[1].data() + fields[1].size()) fail("object count is not an integer");
        if (n < 1) fail("object count must be >= 1");

        ManifestEntry e = ManifestEntry::pending(std::string(fields[0]), n);
        if (fields.size() == 3) {
            if (fields[2].starts_with(kDroppedPrefix)) {
                e.status = EntryStatus::Dropped;
                e.detail = std::string(fields[2].substr(kDroppedPrefix.size()));
            } else {
                if (fields[2].empty()) fail("empty annotation path");
                e.status = EntryStatus::Annotated;
                e.detail = std::string(fields[2]);
            }
        }
        if (!seen.insert(e.image_path).second) {
            throw Error(ErrorCode::DuplicatePath, "image path '" + e.image_path + "' listed twice");
        }
        m.entries.push_back(std::move(e));
    }
    return m;
}

void write_manifest(const DatasetManifest& m, const fs::path& path) { write_file_atomic(path, to_text(m)); }

DatasetManifest read_manifest(const fs::path& path) { return parse_manifest(read_file(path)); }

} // namespace autobox
