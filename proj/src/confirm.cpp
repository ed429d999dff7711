#include "autobox/confirm.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "autobox/annotation.hpp"
#include "autobox/error.hpp"
#include "autobox/features.hpp"
#include "autobox/image_ops.hpp"

namespace autobox {

void ConfirmPolicy::validate() const {
    if (!(score_threshold >= 0.0 && score_threshold <= 1.0))
        throw Error(ErrorCode::ConfigError, "confirm.score_threshold must lie in [0, 1]");
    if (valid_labels.empty()) throw Error(ErrorCode::ConfigError, "confirm.valid_labels must not be empty");
}

std::string_view to_string(RejectReason r) noexcept {
    return r == RejectReason::LowScore ? "LowScore" : "InvalidLabel";
}

std::optional<RejectReason> gate(const ClassScore& cls, const ConfirmPolicy& policy) {
    if (!policy.valid_labels.contains(cls.label)) return RejectReason::InvalidLabel;
    if (!(cls.score > policy.score_threshold)) return RejectReason::LowScore;
    return std::nullopt;
}

ConfirmResult confirm_boxes(const RasterImage& img, std::span<const Box> boxes, const Scorer& scorer,
                            const ConfirmPolicy& policy) {
    policy.validate();
    std::vector<RasterImage> crops;
    crops.reserve(boxes.size());
    for (const auto& b : boxes) crops.push_back(crop(img, b));
    const auto scores = scorer.score(crops);
    if (scores.size() != boxes.size()) {
        throw Error(ErrorCode::ScorerProtocolError, "scorer returned " + std::to_string(scores.size()) +
                                                        " scores for " + std::to_string(boxes.size()) + " crops");
    }

    ConfirmResult result;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (const auto reason = gate(scores[i], policy)) {
            result.rejected.push_back({boxes[i], scores[i], *reason});
        } else {
            result.accepted.push_back({boxes[i], scores[i]});
        }
    }
    return result;
}

FeatureVector crop_features(const RasterImage& crop) {
    const PixelBins bins = compute_pixel_bins(crop);
    HistogramAccumulator acc;
    for (std::size_t i = 0; i < bins.color.size(); ++i) acc.add(bins, i);
    const auto color = acc.color_hist();
    const auto texture = acc.texture_hist();
    FeatureVector f;
    f.reserve(color.size() + texture.size());
    f.insert(f.end(), color.begin(), color.end());
    f.insert(f.end(), texture.begin(), texture.end());
    return f;
}

double chi_square_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "feature vectors differ in length");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double s = a[i] + b[i];
        if (s > 0.0) d += (a[i] - b[i]) * (a[i] - b[i]) / s;
    }
    return 0.5 * d;
}

std::vector<double> softmax_of_distances(std::span<const double> distances, double temperature) {
    std::vector<double> p(distances.size());
    if (distances.empty()) return p;
    const double dmin = *std::min_element(distances.begin(), distances.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        p[i] = std::exp(-temperature * (distances[i] - dmin));
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

HistogramModel::HistogramModel(std::vector<std::string> labels, std::vector<FeatureVector> centroids,
                               double temperature)
    : labels_(std::move(labels)), centroids_(std::move(centroids)), temperature_(temperature) {
    if (labels_.size() != centroids_.size() || labels_.empty())
        throw Error(ErrorCode::InvalidArgument, "one centroid per label is required");
    if (!(temperature_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "temperature must be positive");
    for (const auto& c : centroids_) {
        if (c.size() != static_cast<std::size_t>(kColorBins + kTextureBins))
            throw Error(ErrorCode::InvalidArgument, "centroid has wrong dimension");
    }
}

std::vector<ClassScore> HistogramModel::distribution(const RasterImage& crop) const {
    const FeatureVector f = crop_features(crop);
    std::vector<double> d;
    d.reserve(centroids_.size());
    for (const auto& c : centroids_) d.push_back(chi_square_distance(f, c));
    const auto p = softmax_of_distances(d, temperature_);
    std::vector<ClassScore> out;
    out.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back({labels_[i], p[i]});
    return out;
}

ClassScore HistogramModel::classify(const RasterImage& crop) const {
    auto dist = distribution(crop);
    const auto best = std::max_element(dist.begin(), dist.end(),
                                       [](const ClassScore& l, const ClassScore& r) { return l.score < r.score; });
    return *best;
}

std::vector<ClassScore> HistogramModel::score(std::span<const RasterImage> crops) const {
    std::vector<ClassScore> out;
    out.reserve(crops.size());
    for (const auto& c : crops) out.push_back(classify(c));
    return out;
}

void HistogramModel::save(const std::filesystem::path& path) const {
    nlohmann::ordered_json j;
    j["temperature"] = temperature_;
    j["categories"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        j["categories"].push_back({{"label", labels_[i]}, {"centroid", centroids_[i]}});
    }
    write_file_atomic(path, j.dump(1) + "\n");
}

HistogramModel HistogramModel::load(const std::filesystem::path& path) {
    try {
        const auto j = nlohmann::json::parse(read_file(path));
        std::vector<std::string> labels;
        std::vector<FeatureVector> centroids;
        for (const auto& c : j.at("categories")) {
            labels.push_back(c.at("label").get<std::string>());
            centroids.push_back(c.at("centroid").get<FeatureVector>());
        }
        return HistogramModel(std::move(labels), std::move(centroids), j.at("temperature").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

HistogramModel train_baseline(std::span<const LabeledCrop> crops, std::vector<std::string> categories,
                              double temperature) {
    std::map<std::string, std::pair<FeatureVector, int>> sums;
    for (const auto& label : categories) sums[label] = {FeatureVector(kColorBins + kTextureBins, 0.0), 0};
    const bool declared = !categories.empty();

    for (const auto& c : crops) {
        auto it = sums.find(c.label);
        if (it == sums.end()) {
            if (declared)
                throw Error(ErrorCode::InvalidArgument, "crop label '" + c.label + "' is not a declared category");
            it = sums.emplace(c.label, std::pair{FeatureVector(kColorBins + kTextureBins, 0.0), 0}).first;
        }
        const auto f = crop_features(c.crop);
        for (std::size_t i = 0; i < f.size(); ++i) it->second.first[i] += f[i];
        ++it->second.second;
    }
    if (sums.size() < 2) throw Error(ErrorCode::InvalidArgument, "at least two categories are required");

    std::vector<std::string> labels;
    std::vector<FeatureVector> centroids;
    for (auto& [label, acc] : sums) {
        if (acc.second == 0) throw Error(ErrorCode::EmptyCategory, "category '" + label + "' has no crops");
        for (auto& v : acc.first) v /= acc.second;
        labels.push_back(label);
        centroids.push_back(std::move(acc.first));
    }
    return HistogramModel(std::move(labels), std::move(centroids), temperature);
}

} // namespace autobox
