#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "textgraph/harmclf/features.hpp"
#include "textgraph/metrics/metrics.hpp"

namespace textgraph::harmclf {

/// Ordinal harm scale, label k + 1 at index k.
inline const std::array<std::string, 5> kHarmClasses{"No harm", "Low", "Moderate", "Severe", "Death"};

struct LabeledDataset {
    Eigen::MatrixXd x;
    std::vector<int> labels;
    std::vector<ColumnRange> standardize;  ///< columns scaled with training-fold statistics

    std::size_t size() const noexcept { return labels.size(); }
    LabeledDataset subset(std::span<const std::size_t> rows) const;
};

/// Throws SizeMismatch when the row counts differ.
LabeledDataset make_dataset(FeatureMatrix features, std::vector<int> labels);

/// Indices of a per-class sample without replacement: counts[k] rows of class
/// classes[k]. Returned in ascending row order. Throws InsufficientClass.
std::vector<std::size_t> balanced_sample(std::span<const int> labels, std::span<const int> classes,
                                         std::span<const std::size_t> counts, std::uint64_t seed);

/// Scores are x * weights + intercept; the prediction is the class of the
/// largest score (first class on ties).
struct LinearModel {
    std::vector<int> classes;
    Eigen::MatrixXd weights;    ///< F x K
    Eigen::RowVectorXd intercept;

    Eigen::MatrixXd scores(const Eigen::MatrixXd& x) const;
    std::vector<int> predict(const Eigen::MatrixXd& x) const;
};

/// One-vs-rest least squares on +-1 targets with penalty alpha on the weights
/// but not the intercept. Throws InvalidArgument for alpha <= 0 and
/// DegenerateLabels for fewer than two classes.
LinearModel ridge_train(const Eigen::MatrixXd& x, std::span<const int> labels, double alpha = 1.0);

struct SvmOptions {
    double c = 10.0;
    double tolerance = 1e-4;
    std::size_t max_epochs = 200;
    std::uint64_t seed = 0;
};

/// Per-class objective 0.5 |w|^2 + C * sum of hinge losses, bias included as
/// a constant feature.
struct SvmFit {
    LinearModel model;
    std::vector<double> objective;  ///< full-batch objective (summed over classes) after each epoch
    std::size_t epochs = 0;
};

/// One-vs-rest linear SVM by Pegasos-style stochastic subgradient descent.
/// Each epoch visits the rows in a seeded random order; the iterate kept is
/// the best seen by full-batch objective, so `objective` never increases.
/// Stops when the relative change drops below the tolerance.
SvmFit svm_linear_train(const Eigen::MatrixXd& x, std::span<const int> labels, const SvmOptions& options = {});

enum class ModelKind { Ridge, LinearSvm };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct ModelSpec {
    ModelKind kind = ModelKind::Ridge;
    double alpha = 1.0;
    SvmOptions svm;
};

LinearModel train(const LabeledDataset& data, const ModelSpec& spec);

/// Fold index per row: each class is shuffled and dealt round-robin, starting
/// where the previous class stopped. Throws DegenerateLabels when a class has
/// fewer rows than folds.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed);

struct CVReport {
    std::vector<int> classes;
    std::vector<double> fold_f1;
    double mean_f1 = 0.0;
    double sd_f1 = 0.0;  ///< sample standard deviation over folds
    std::vector<metrics::ClassScores> per_class;  ///< pooled out-of-fold predictions
    std::vector<std::vector<std::size_t>> confusion;  ///< rows true class, columns predicted
    std::vector<int> predictions;                     ///< out-of-fold, per row
};

/// Standardized columns use the mean and sample SD of the training rows of
/// each fold. Folds train independently on `workers` threads.
CVReport cross_validate(const LabeledDataset& data, const ModelSpec& spec, std::size_t folds = 5,
                        std::uint64_t seed = 0, std::size_t workers = 1);

nlohmann::json to_json(const CVReport& report);

/// Mean weighted F1 per classifier (rows) and feature set (columns).
struct F1Table {
    std::vector<std::string> feature_sets;
    std::vector<std::string> classifiers;
    std::vector<std::vector<double>> mean_f1;
};

std::string format_table(const F1Table& table);

}  // namespace textgraph::harmclf
