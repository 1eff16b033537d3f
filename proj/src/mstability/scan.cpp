#include "textgraph/mstability/scan.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "textgraph/common/error.hpp"
#include "textgraph/common/io.hpp"
#include "textgraph/common/parallel.hpp"
#include "textgraph/common/random.hpp"
#include "textgraph/metrics/metrics.hpp"
#include "textgraph/mstability/louvain.hpp"

namespace textgraph::mstability {

std::vector<double> log_time_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi >= lo) || points == 0) throw InvalidArgument("log grid needs 0 < lo <= hi and points >= 1");
    if (points == 1) return {lo};
    std::vector<double> out(points);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t k = 0; k < points; ++k)
        out[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linear_time_grid(double lo, double hi, double step) {
    if (!(lo > 0.0) || !(hi >= lo) || !(step > 0.0)) throw InvalidArgument("linear grid needs 0 < lo <= hi and step > 0");
    std::vector<double> out;
    for (std::size_t k = 0;; ++k) {
        const double t = lo + static_cast<double>(k) * step;
        if (t > hi + 0.5 * step) break;
        out.push_back(t);
    }
    return out;
}

void validate(const ScanConfig& config) {
    if (config.times.empty()) throw InvalidArgument("time grid is empty");
    for (std::size_t k = 0; k < config.times.size(); ++k) {
        if (!(config.times[k] > 0.0)) throw InvalidArgument("Markov times must be positive");
        if (k > 0 && !(config.times[k] > config.times[k - 1])) throw InvalidArgument("time grid must be increasing");
    }
    if (config.runs_per_time == 0) throw InvalidArgument("runs_per_time must be at least 1");
    if (config.keep_top == 0 || config.keep_top > config.runs_per_time)
        throw InvalidArgument("keep_top must lie in [1, runs_per_time]");
}

namespace {

// Groups equal partitions; returns distinct partitions and their multiplicities.
std::pair<std::vector<const Partition*>, std::vector<std::size_t>> distinct(const std::vector<Partition>& parts) {
    std::map<std::vector<Partition::ClusterId>, std::size_t> index;
    std::vector<const Partition*> unique;
    std::vector<std::size_t> count;
    for (const Partition& p : parts) {
        auto [it, inserted] = index.emplace(p.assignment(), unique.size());
        if (inserted) {
            unique.push_back(&p);
            count.push_back(0);
        }
        ++count[it->second];
    }
    return {unique, count};
}

}  // namespace

double mean_pairwise_vi(const std::vector<Partition>& partitions) {
    const std::size_t k = partitions.size();
    if (k < 2) return 0.0;
    const auto [unique, count] = distinct(partitions);
    double total = 0.0;
    for (std::size_t a = 0; a < unique.size(); ++a) {
        for (std::size_t b = a + 1; b < unique.size(); ++b) {
            total += static_cast<double>(count[a] * count[b]) * metrics::variation_of_information(*unique[a], *unique[b]);
        }
    }
    return total / (0.5 * static_cast<double>(k) * static_cast<double>(k - 1));
}

Eigen::MatrixXd pairwise_vi_matrix(const std::vector<Partition>& partitions) {
    const auto k = static_cast<Eigen::Index>(partitions.size());
    const auto [unique, count] = distinct(partitions);
    std::map<std::vector<Partition::ClusterId>, std::size_t> slot;
    for (std::size_t u = 0; u < unique.size(); ++u) slot.emplace(unique[u]->assignment(), u);
    Eigen::MatrixXd between = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(unique.size()),
                                                    static_cast<Eigen::Index>(unique.size()));
    for (std::size_t a = 0; a < unique.size(); ++a) {
        for (std::size_t b = a + 1; b < unique.size(); ++b) {
            const double v = metrics::variation_of_information(*unique[a], *unique[b]);
            between(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
            between(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
        }
    }
    std::vector<Eigen::Index> of(partitions.size());
    for (std::size_t i = 0; i < partitions.size(); ++i)
        of[i] = static_cast<Eigen::Index>(slot.at(partitions[i].assignment()));
    Eigen::MatrixXd out(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) out(i, j) = between(of[static_cast<std::size_t>(i)], of[static_cast<std::size_t>(j)]);
    return out;
}

ScanResult scan(const MarkovProcess& process, const ScanConfig& config) {
    validate(config);
    ScanResult result;
    result.points.reserve(config.times.size());
    std::vector<LouvainResult> runs(config.runs_per_time);
    std::vector<std::size_t> order(config.runs_per_time);

    for (std::size_t ti = 0; ti < config.times.size(); ++ti) {
        const double t = config.times[ti];
        const StabilityProblem problem(process, t);
        parallel_for(config.runs_per_time, config.workers, [&](std::size_t run) {
            runs[run] = louvain_optimize(problem, derive_seed(config.seed, ti, run));
        });

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const LouvainResult& x = runs[a];
            const LouvainResult& y = runs[b];
            if (x.stability != y.stability) return x.stability > y.stability;
            if (x.partition.num_clusters() != y.partition.num_clusters())
                return x.partition.num_clusters() < y.partition.num_clusters();
            if (x.partition != y.partition) return x.partition < y.partition;
            return a < b;
        });

        std::vector<Partition> top;
        top.reserve(config.keep_top);
        for (std::size_t k = 0; k < config.keep_top; ++k) top.push_back(runs[order[k]].partition);

        ScanPoint point;
        point.t = t;
        point.best = runs[order.front()].partition;
        point.r = runs[order.front()].stability;
        point.vi_ensemble = mean_pairwise_vi(top);
        result.points.push_back(std::move(point));
    }

    std::vector<Partition> best;
    best.reserve(result.points.size());
    for (const ScanPoint& p : result.points) best.push_back(p.best);
    result.vi_matrix = pairwise_vi_matrix(best);
    return result;
}

std::string format_scan_jsonl(const ScanResult& result) {
    std::string out;
    for (const ScanPoint& p : result.points) {
        nlohmann::ordered_json j;
        j["t"] = p.t;
        j["r"] = p.r;
        j["num_clusters"] = p.best.num_clusters();
        j["vi_ensemble"] = p.vi_ensemble;
        j["partition"] = p.best.assignment();
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string format_matrix(const Eigen::MatrixXd& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out += ' ';
            out += format_float(m(i, j));
        }
        out += '\n';
    }
    return out;
}

Eigen::MatrixXd parse_matrix(std::string_view text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        std::string field;
        std::vector<double> row;
        while (fields >> field) {
            double v = 0.0;
            const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc{} || p != field.data() + field.size()) throw ParseError("bad matrix entry '" + field + "'");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw ParseError("ragged matrix");
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

ScanResult parse_scan(std::string_view jsonl, std::string_view vi_matrix) {
    ScanResult result;
    std::istringstream in{std::string(jsonl)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            ScanPoint p;
            p.t = j.at("t").get<double>();
            p.r = j.at("r").get<double>();
            p.vi_ensemble = j.at("vi_ensemble").get<double>();
            const auto labels = j.at("partition").get<std::vector<std::int64_t>>();
            p.best = Partition::from_labels(std::span<const std::int64_t>(labels));
            result.points.push_back(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("scan record: ") + e.what());
        }
    }
    result.vi_matrix = parse_matrix(vi_matrix);
    const auto k = static_cast<Eigen::Index>(result.points.size());
    if (result.vi_matrix.rows() != k || result.vi_matrix.cols() != k)
        throw ParseError("VI matrix does not match the number of scan records");
    return result;
}

}  // namespace textgraph::mstability
