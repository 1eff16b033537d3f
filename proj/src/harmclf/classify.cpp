#include "textgraph/harmclf/classify.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "textgraph/common/error.hpp"
#include "textgraph/common/parallel.hpp"
#include "textgraph/common/random.hpp"

namespace textgraph::harmclf {

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
    LabeledDataset out;
    out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
    out.labels.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.x.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(rows[k]));
        out.labels.push_back(labels.at(rows[k]));
    }
    out.standardize = standardize;
    return out;
}

LabeledDataset make_dataset(FeatureMatrix features, std::vector<int> labels) {
    if (static_cast<std::size_t>(features.x.rows()) != labels.size())
        throw SizeMismatch("feature matrix has " + std::to_string(features.x.rows()) + " rows for " +
                           std::to_string(labels.size()) + " labels");
    LabeledDataset d;
    d.standardize = features.standardized();
    d.x = std::move(features.x);
    d.labels = std::move(labels);
    return d;
}

std::vector<std::size_t> balanced_sample(std::span<const int> labels, std::span<const int> classes,
                                         std::span<const std::size_t> counts, std::uint64_t seed) {
    if (classes.size() != counts.size()) throw SizeMismatch("one count per class is required");
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == classes[k]) rows.push_back(i);
        if (rows.size() < counts[k])
            throw InsufficientClass("class " + std::to_string(classes[k]) + ": have " + std::to_string(rows.size()) +
                                    ", want " + std::to_string(counts[k]));
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
        // partial Fisher-Yates
        for (std::size_t j = 0; j < counts[k]; ++j) {
            const std::size_t pick = j + static_cast<std::size_t>(rng.uniform_index(rows.size() - j));
            std::swap(rows[j], rows[pick]);
            out.push_back(rows[j]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Eigen::MatrixXd LinearModel::scores(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd s = x * weights;
    s.rowwise() += intercept;
    return s;
}

std::vector<int> LinearModel::predict(const Eigen::MatrixXd& x) const {
    const Eigen::MatrixXd s = scores(x);
    std::vector<int> out(static_cast<std::size_t>(s.rows()));
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < s.cols(); ++k)
            if (s(i, k) > s(i, best)) best = k;
        out[static_cast<std::size_t>(i)] = classes[static_cast<std::size_t>(best)];
    }
    return out;
}

namespace {

std::vector<int> distinct_classes(std::span<const int> labels) {
    const std::set<int> s(labels.begin(), labels.end());
    if (s.size() < 2) throw DegenerateLabels("need at least two classes, got " + std::to_string(s.size()));
    return {s.begin(), s.end()};
}

// N x K matrix of +1 for the row's class and -1 elsewhere.
Eigen::MatrixXd indicator_targets(std::span<const int> labels, const std::vector<int>& classes) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(labels.size()),
                                                  static_cast<Eigen::Index>(classes.size()), -1.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto k = std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin();
        y(static_cast<Eigen::Index>(i), k) = 1.0;
    }
    return y;
}

void check_rows(const Eigen::MatrixXd& x, std::span<const int> labels) {
    if (static_cast<std::size_t>(x.rows()) != labels.size())
        throw SizeMismatch("feature matrix has " + std::to_string(x.rows()) + " rows for " +
                           std::to_string(labels.size()) + " labels");
}

}  // namespace

LinearModel ridge_train(const Eigen::MatrixXd& x, std::span<const int> labels, double alpha) {
    if (!(alpha > 0.0)) throw InvalidArgument("ridge alpha must be positive");
    check_rows(x, labels);
    LinearModel model;
    model.classes = distinct_classes(labels);
    const Eigen::MatrixXd y = indicator_targets(labels, model.classes);

    // centring removes the intercept from the penalized system
    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const Eigen::RowVectorXd y_mean = y.colwise().mean();
    const Eigen::MatrixXd xc = x.rowwise() - x_mean;
    const Eigen::MatrixXd yc = y.rowwise() - y_mean;
    if (xc.cols() <= xc.rows()) {
        Eigen::MatrixXd gram = xc.transpose() * xc;
        gram.diagonal().array() += alpha;
        model.weights = gram.ldlt().solve(xc.transpose() * yc);
    } else {
        // same solution through the n x n system: w = X^T (X X^T + aI)^-1 y
        Eigen::MatrixXd kernel = xc * xc.transpose();
        kernel.diagonal().array() += alpha;
        model.weights = xc.transpose() * kernel.ldlt().solve(yc);
    }
    model.intercept = y_mean - x_mean * model.weights;
    return model;
}

namespace {

// 0.5 |w|^2 + c * sum max(0, 1 - y (x w + b)), bias b regularized with w.
template <typename Matrix>
double svm_objective(const Matrix& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b,
                     double c) {
    const Eigen::VectorXd margin = (y.array() * ((x * w).array() + b)).matrix();
    const double hinge = (1.0 - margin.array()).max(0.0).sum();
    return 0.5 * (w.squaredNorm() + b * b) + c * hinge;
}

}  // namespace

SvmFit svm_linear_train(const Eigen::MatrixXd& x, std::span<const int> labels, const SvmOptions& options) {
    if (!(options.c > 0.0)) throw InvalidArgument("SVM penalty must be positive");
    if (options.max_epochs == 0) throw InvalidArgument("SVM needs at least one epoch");
    check_rows(x, labels);
    SvmFit fit;
    fit.model.classes = distinct_classes(labels);
    const std::size_t n = labels.size();
    const auto k_count = static_cast<Eigen::Index>(fit.model.classes.size());
    const Eigen::MatrixXd y = indicator_targets(labels, fit.model.classes);
    const double lambda = 1.0 / (options.c * static_cast<double>(n));
    const double radius = 1.0 / std::sqrt(lambda);

    // rows as sparse vectors: text features are mostly zeros
    const Eigen::SparseMatrix<double, Eigen::RowMajor> xs = x.sparseView();
    Eigen::VectorXd row_sq(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) row_sq(i) = xs.row(i).squaredNorm() + 1.0;

    struct State {
        Eigen::VectorXd v;  // w = scale * v
        double bias_v = 0.0;
        double scale = 1.0;
        double v_sq = 0.0;  // |v|^2 + bias_v^2, updated incrementally
        Eigen::VectorXd best_w;
        double best_b = 0.0;
        double best_obj = std::numeric_limits<double>::infinity();
        double last_obj = std::numeric_limits<double>::infinity();
        std::size_t step = 0;
        Rng rng{0};
    };
    std::vector<State> states(static_cast<std::size_t>(k_count));
    for (Eigen::Index k = 0; k < k_count; ++k) {
        State& s = states[static_cast<std::size_t>(k)];
        s.v = Eigen::VectorXd::Zero(x.cols());
        s.best_w = s.v;
        s.rng = Rng(derive_seed(options.seed, static_cast<std::uint64_t>(k)));
    }

    std::vector<std::size_t> order(n);
    double previous_total = std::numeric_limits<double>::infinity();
    for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
        double current_total = 0.0;
        double best_total = 0.0;
        for (Eigen::Index k = 0; k < k_count; ++k) {
            State& s = states[static_cast<std::size_t>(k)];
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            s.rng.shuffle(std::span(order));
            for (const std::size_t i : order) {
                ++s.step;
                const double eta = 1.0 / (lambda * static_cast<double>(s.step));
                const auto row = static_cast<Eigen::Index>(i);
                const double yi = y(row, k);
                const double inner = xs.row(row).dot(s.v) + s.bias_v;
                const double margin = yi * s.scale * inner;
                // shrink by (1 - 1/step); the first step zeroes the iterate
                if (s.step == 1) {
                    s.v.setZero();
                    s.bias_v = 0.0;
                    s.scale = 1.0;
                    s.v_sq = 0.0;
                } else {
                    s.scale *= 1.0 - 1.0 / static_cast<double>(s.step);
                }
                if (margin < 1.0) {
                    const double a = eta * yi / s.scale;
                    s.v += a * xs.row(row).transpose();
                    s.bias_v += a;
                    s.v_sq += (s.step == 1 ? 0.0 : 2.0 * a * inner) + a * a * row_sq(row);
                }
                const double norm = s.scale * std::sqrt(std::max(s.v_sq, 0.0));
                if (norm > radius) s.scale *= radius / norm;
                if (s.scale < 1e-100) {
                    s.v *= s.scale;
                    s.bias_v *= s.scale;
                    s.v_sq *= s.scale * s.scale;
                    s.scale = 1.0;
                }
            }
            s.v_sq = s.v.squaredNorm() + s.bias_v * s.bias_v;  // drop accumulated rounding
            const Eigen::VectorXd w = s.scale * s.v;
            const double b = s.scale * s.bias_v;
            const double obj = svm_objective(xs, y.col(k), w, b, options.c);
            if (obj < s.best_obj) {
                s.best_obj = obj;
                s.best_w = w;
                s.best_b = b;
            }
            s.last_obj = obj;
            current_total += obj;
            best_total += s.best_obj;
        }
        fit.objective.push_back(best_total);
        fit.epochs = epoch + 1;
        const double change = std::abs(previous_total - current_total) / std::max(current_total, 1e-300);
        if (change < options.tolerance) break;
        previous_total = current_total;
    }

    fit.model.weights.resize(x.cols(), k_count);
    fit.model.intercept.resize(k_count);
    for (Eigen::Index k = 0; k < k_count; ++k) {
        fit.model.weights.col(k) = states[static_cast<std::size_t>(k)].best_w;
        fit.model.intercept(k) = states[static_cast<std::size_t>(k)].best_b;
    }
    return fit;
}

std::string_view to_string(ModelKind kind) { return kind == ModelKind::Ridge ? "ridge" : "svm"; }

ModelKind parse_model_kind(std::string_view text) {
    if (text == "ridge") return ModelKind::Ridge;
    if (text == "svm") return ModelKind::LinearSvm;
    throw ConfigError("unknown classifier '" + std::string(text) + "' (expected ridge or svm)");
}

LinearModel train(const LabeledDataset& data, const ModelSpec& spec) {
    if (spec.kind == ModelKind::Ridge) return ridge_train(data.x, data.labels, spec.alpha);
    return svm_linear_train(data.x, data.labels, spec.svm).model;
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw InvalidArgument("cross-validation needs at least two folds");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    std::vector<std::size_t> fold(labels.size(), 0);
    std::size_t offset = 0;
    std::uint64_t class_index = 0;
    for (auto& [label, rows] : by_class) {
        if (rows.size() < folds)
            throw DegenerateLabels("class " + std::to_string(label) + " has " + std::to_string(rows.size()) +
                                   " rows for " + std::to_string(folds) + " folds");
        Rng rng(derive_seed(seed, class_index++));
        rng.shuffle(std::span(rows));
        for (std::size_t j = 0; j < rows.size(); ++j) fold[rows[j]] = (offset + j) % folds;
        offset = (offset + rows.size()) % folds;
    }
    return fold;
}

namespace {

// Scales the given columns of both matrices by the training mean and sample SD.
void standardize_columns(Eigen::MatrixXd& train_x, Eigen::MatrixXd& test_x, const std::vector<ColumnRange>& ranges) {
    const double n = static_cast<double>(train_x.rows());
    for (const ColumnRange& r : ranges) {
        for (std::size_t c = r.begin; c < r.end; ++c) {
            const auto col = static_cast<Eigen::Index>(c);
            const double mean = train_x.col(col).mean();
            const double ss = (train_x.col(col).array() - mean).square().sum();
            double sd = n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 0.0;
            if (!(sd > 0.0)) sd = 1.0;  // constant column: centre only
            train_x.col(col) = (train_x.col(col).array() - mean) / sd;
            test_x.col(col) = (test_x.col(col).array() - mean) / sd;
        }
    }
}

}  // namespace

CVReport cross_validate(const LabeledDataset& data, const ModelSpec& spec, std::size_t folds, std::uint64_t seed,
                        std::size_t workers) {
    check_rows(data.x, data.labels);
    CVReport report;
    report.classes = distinct_classes(data.labels);
    const std::vector<std::size_t> fold = stratified_folds(data.labels, folds, seed);
    report.fold_f1.assign(folds, 0.0);
    report.predictions.assign(data.size(), 0);

    parallel_for(folds, workers, [&](std::size_t f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < data.size(); ++i) (fold[i] == f ? test_rows : train_rows).push_back(i);
        LabeledDataset train_set = data.subset(train_rows);
        LabeledDataset test_set = data.subset(test_rows);
        standardize_columns(train_set.x, test_set.x, data.standardize);
        ModelSpec fold_spec = spec;
        fold_spec.svm.seed = derive_seed(spec.svm.seed, static_cast<std::uint64_t>(f));
        const LinearModel model = train(train_set, fold_spec);
        const std::vector<int> predicted = model.predict(test_set.x);
        report.fold_f1[f] = metrics::weighted_f1(predicted, test_set.labels);
        for (std::size_t k = 0; k < test_rows.size(); ++k) report.predictions[test_rows[k]] = predicted[k];
    });

    double sum = 0.0;
    for (const double v : report.fold_f1) sum += v;
    report.mean_f1 = sum / static_cast<double>(folds);
    double ss = 0.0;
    for (const double v : report.fold_f1) ss += (v - report.mean_f1) * (v - report.mean_f1);
    report.sd_f1 = std::sqrt(ss / static_cast<double>(folds - 1));

    report.per_class = metrics::class_scores(report.predictions, data.labels);
    const std::size_t k = report.classes.size();
    report.confusion.assign(k, std::vector<std::size_t>(k, 0));
    auto index = [&](int label) {
        return static_cast<std::size_t>(std::lower_bound(report.classes.begin(), report.classes.end(), label) -
                                        report.classes.begin());
    };
    for (std::size_t i = 0; i < data.size(); ++i) ++report.confusion[index(data.labels[i])][index(report.predictions[i])];
    return report;
}

nlohmann::json to_json(const CVReport& report) {
    nlohmann::json per_class = nlohmann::json::array();
    for (const metrics::ClassScores& s : report.per_class) {
        nlohmann::json j{{"label", s.label},   {"precision", s.precision}, {"recall", s.recall},
                         {"f1", s.f1},         {"support", s.support}};
        if (s.label >= 1 && s.label <= static_cast<int>(kHarmClasses.size()))
            j["name"] = kHarmClasses[static_cast<std::size_t>(s.label - 1)];
        per_class.push_back(std::move(j));
    }
    return {{"classes", report.classes},     {"fold_f1", report.fold_f1},     {"mean_f1", report.mean_f1},
            {"sd_f1", report.sd_f1},         {"per_class", per_class},        {"confusion", report.confusion}};
}

std::string format_table(const F1Table& table) {
    std::size_t first = std::string("Classifier").size();
    for (const std::string& c : table.classifiers) first = std::max(first, c.size());
    std::vector<std::size_t> widths;
    for (const std::string& f : table.feature_sets) widths.push_back(std::max<std::size_t>(f.size(), 5));

    auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(s.size(), w), ' ');
        return s;
    };
    std::string out = pad("Classifier", first);
    for (std::size_t j = 0; j < widths.size(); ++j) out += "  " + pad(table.feature_sets[j], widths[j]);
    out += '\n';
    for (std::size_t i = 0; i < table.classifiers.size(); ++i) {
        out += pad(table.classifiers[i], first);
        for (std::size_t j = 0; j < widths.size(); ++j) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", table.mean_f1.at(i).at(j));
            out += "  " + pad(buf, widths[j]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace textgraph::harmclf
