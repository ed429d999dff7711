#include "autobox/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "autobox/error.hpp"

namespace autobox {

namespace fs = std::filesystem;

namespace {

std::vector<int> encode_params(const fs::path& path) {
    auto ext = path.extension().string();
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ext == ".jpg" || ext == ".jpeg") return {cv::IMWRITE_JPEG_QUALITY, 95};
    if (ext == ".png") return {cv::IMWRITE_PNG_COMPRESSION, 3};
    return {};
}

void write_mat(const cv::Mat& mat, const fs::path& path) {
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat, encode_params(path));
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::IoFailure, "cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

} // namespace

RasterImage read_image(const fs::path& path) {
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) throw Error(ErrorCode::IoFailure, "cannot read image " + path.string());
    RasterImage img(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) img.set(x, y, {row[x][2], row[x][1], row[x][0]});
    }
    return img;
}

void write_image(const RasterImage& img, const fs::path& path) {
    cv::Mat bgr(img.height(), img.width(), CV_8UC3);
    for (int y = 0; y < img.height(); ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width(); ++x) {
            const Rgb c = img.at(x, y);
            row[x] = {c.b, c.g, c.r};
        }
    }
    write_mat(bgr, path);
}

void write_rgba_png(const RasterImage& img, const BinaryMask& mask, const fs::path& path) {
    if (mask.width() != img.width() || mask.height() != img.height()) {
        throw Error(ErrorCode::InvalidArgument, "mask and image dimensions differ");
    }
    cv::Mat bgra(img.height(), img.width(), CV_8UC4);
    for (int y = 0; y < img.height(); ++y) {
        auto* row = bgra.ptr<cv::Vec4b>(y);
        for (int x = 0; x < img.width(); ++x) {
            const Rgb c = img.at(x, y);
            row[x] = {c.b, c.g, c.r, static_cast<std::uint8_t>(mask.at(x, y) ? 255 : 0)};
        }
    }
    write_mat(bgra, path);
}

std::pair<RasterImage, BinaryMask> read_rgba_png(const fs::path& path) {
    cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (mat.empty()) throw Error(ErrorCode::IoFailure, "cannot read image " + path.string());
    if (mat.type() != CV_8UC4) {
        throw Error(ErrorCode::IoFailure, path.string() + " is not an 8-bit RGBA image");
    }
    RasterImage img(mat.cols, mat.rows);
    BinaryMask mask(mat.cols, mat.rows);
    for (int y = 0; y < mat.rows; ++y) {
        const auto* row = mat.ptr<cv::Vec4b>(y);
        for (int x = 0; x < mat.cols; ++x) {
            img.set(x, y, {row[x][2], row[x][1], row[x][0]});
            mask.set(x, y, row[x][3] >= 128);
        }
    }
    return {std::move(img), std::move(mask)};
}

} // namespace autobox
