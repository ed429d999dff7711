#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autobox/box.hpp"
#include "autobox/image.hpp"

namespace autobox {

struct ClassScore {
    std::string label;
    double score = 0.0; // softmax probability in [0, 1]

    friend bool operator==(const ClassScore&, const ClassScore&) = default;
};

/// Scores crops in batches: one argmax ClassScore per crop, same order.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual std::vector<ClassScore> score(std::span<const RasterImage> crops) const = 0;
};

struct ConfirmPolicy {
    double score_threshold = 0.8;
    std::set<std::string> valid_labels;

    void validate() const;
};

enum class RejectReason { LowScore, InvalidLabel };
std::string_view to_string(RejectReason r) noexcept;

struct ConfirmedBox {
    Box box;
    ClassScore cls;
};

struct RejectedBox {
    Box box;
    ClassScore cls;
    RejectReason reason;
};

struct ConfirmResult {
    std::vector<ConfirmedBox> accepted;
    std::vector<RejectedBox> rejected;
};

/// The acceptance gate alone: label in valid_labels and score strictly above
/// the threshold. Returns the rejection reason, or nothing when accepted.
/// An invalid label takes precedence over a low score.
std::optional<RejectReason> gate(const ClassScore& cls, const ConfirmPolicy& policy);

/// Crops every box, scores the crops in one batch, and splits the boxes into
/// accepted and rejected (with reasons). Order within each list follows
/// the input order.
ConfirmResult confirm_boxes(const RasterImage& img, std::span<const Box> boxes, const Scorer& scorer,
                            const ConfirmPolicy& policy);

/// Colour block (75 bins) followed by texture block (240 bins), each summing to 1.
using FeatureVector = std::vector<double>;

FeatureVector crop_features(const RasterImage& crop);

/// 0.5 * sum (a-b)^2 / (a+b), skipping bins where both are zero.
double chi_square_distance(std::span<const double> a, std::span<const double> b);

/// softmax(-temperature * d). Sums to 1.
std::vector<double> softmax_of_distances(std::span<const double> distances, double temperature);

/// Nearest-centroid histogram classifier standing in for a CNN.
class HistogramModel : public Scorer {
public:
    HistogramModel(std::vector<std::string> labels, std::vector<FeatureVector> centroids, double temperature);

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<FeatureVector>& centroids() const noexcept { return centroids_; }
    double temperature() const noexcept { return temperature_; }

    /// Probability for every label, in labels() order.
    std::vector<ClassScore> distribution(const RasterImage& crop) const;
    /// Argmax of distribution(); ties go to the earlier label.
    ClassScore classify(const RasterImage& crop) const;

    std::vector<ClassScore> score(std::span<const RasterImage> crops) const override;

    void save(const std::filesystem::path& path) const;
    static HistogramModel load(const std::filesystem::path& path);

private:
    std::vector<std::string> labels_;
    std::vector<FeatureVector> centroids_;
    double temperature_;
};

struct LabeledCrop {
    std::string label;
    RasterImage crop;
};

/// Mean feature vector per category. `categories` lists the expected labels;
/// when empty it is taken from the crops. Labels are stored sorted.
/// Throws EmptyCategory for a declared label without crops, InvalidArgument
/// for fewer than two categories.
HistogramModel train_baseline(std::span<const LabeledCrop> crops, std::vector<std::string> categories = {},
                              double temperature = 10.0);

} // namespace autobox
