#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "textgraph/common/partition.hpp"
#include "textgraph/mstability/markov.hpp"

namespace textgraph::mstability {

/// `points` times spaced evenly in log t over [lo, hi], both ends included.
std::vector<double> log_time_grid(double lo, double hi, std::size_t points);
/// lo, lo + step, ... up to hi (inclusive within half a step). Times are
/// computed as lo + k * step, not by accumulation.
std::vector<double> linear_time_grid(double lo, double hi, double step);

struct ScanConfig {
    std::vector<double> times;
    std::size_t runs_per_time = 500;
    std::size_t keep_top = 50;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

/// Throws InvalidArgument for an empty or non-increasing grid, a non-positive
/// time, zero runs, or keep_top outside [1, runs_per_time].
void validate(const ScanConfig& config);

struct ScanPoint {
    double t = 0.0;
    Partition best;
    double r = 0.0;
    double vi_ensemble = 0.0;  ///< mean pairwise VI over the keep_top best runs
};

struct ScanResult {
    std::vector<ScanPoint> points;
    Eigen::MatrixXd vi_matrix;  ///< VI between best partitions of every pair of times
};

/// Runs `runs_per_time` Louvain optimizations per time with seeds derived from
/// (seed, time index, run index). Runs are ranked by (r desc, cluster count
/// asc, canonical assignment asc); the first is the best partition. The result
/// does not depend on `workers`.
ScanResult scan(const MarkovProcess& process, const ScanConfig& config);

/// Mean VI over all pairs of the given partitions (0 for fewer than two).
double mean_pairwise_vi(const std::vector<Partition>& partitions);

/// VI between every pair of partitions; identical partitions are compared once.
Eigen::MatrixXd pairwise_vi_matrix(const std::vector<Partition>& partitions);

/// One JSON object per line: t, r, num_clusters, vi_ensemble, partition.
std::string format_scan_jsonl(const ScanResult& result);
/// Rows of space-separated values with 17 significant digits.
std::string format_matrix(const Eigen::MatrixXd& m);

ScanResult parse_scan(std::string_view jsonl, std::string_view vi_matrix);
Eigen::MatrixXd parse_matrix(std::string_view text);

}  // namespace textgraph::mstability
