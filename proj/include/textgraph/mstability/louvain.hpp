#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "textgraph/common/partition.hpp"
#include "textgraph/mstability/markov.hpp"

namespace textgraph::mstability {

/// Flow entries below this are dropped from the optimizer's neighbour lists.
/// The discarded mass is below threshold * N^2.
inline constexpr double kFlowThreshold = 1e-14;

/// Everything the optimizer needs at one Markov time. Immutable once built,
/// so concurrent runs can share it.
class StabilityProblem {
public:
    /// `autocovariance` is B = diag(pi) P(t) - pi pi^T.
    StabilityProblem(Eigen::MatrixXd autocovariance, Eigen::VectorXd pi, double threshold = kFlowThreshold);
    StabilityProblem(const MarkovProcess& process, double t, double threshold = kFlowThreshold);

    std::size_t size() const noexcept { return static_cast<std::size_t>(pi_.size()); }
    const Eigen::MatrixXd& autocovariance() const noexcept { return b_; }
    const Eigen::VectorXd& pi() const noexcept { return pi_; }
    /// Off-diagonal flow B + pi pi^T per node, entries below the threshold dropped.
    const std::vector<std::vector<std::pair<std::uint32_t, double>>>& neighbours() const noexcept { return neighbours_; }

    /// Exact stability of a partition on the dense matrix B.
    double stability(const Partition& partition) const { return stability_from_autocovariance(b_, partition); }

private:
    Eigen::MatrixXd b_;
    Eigen::VectorXd pi_;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> neighbours_;
};

struct LouvainResult {
    Partition partition;
    double stability = 0.0;
};

/// Minimum improvement for a node move to be taken. Gains are differences of
/// O(1) sums, so this sits well above their rounding error.
inline constexpr double kMoveTolerance = 1e-13;

/// Louvain on B = diag(pi) P(t) - pi pi^T: local node moves in a seeded random
/// order until no move gains, then aggregation of clusters into nodes, repeated
/// until a level makes no move. The returned stability is recomputed exactly
/// on the final partition.
LouvainResult louvain_optimize(const StabilityProblem& problem, std::uint64_t seed);
LouvainResult louvain_optimize(const MarkovProcess& process, double t, std::uint64_t seed);

}  // namespace textgraph::mstability
