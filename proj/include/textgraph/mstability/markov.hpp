#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "textgraph/common/partition.hpp"
#include "textgraph/simgraph/simgraph.hpp"

namespace textgraph::mstability {

/// Continuous-time random walk on an undirected weighted graph.
///
/// P(t) = exp(-t L) with L = I - D^-1 A. The walk is reversible, so
/// D^-1/2 A D^-1/2 = U diag(mu) U^T is symmetric and
/// P(t) = D^-1/2 U exp(-t (1 - mu)) U^T D^1/2. One eigendecomposition then
/// serves every Markov time. When the degree ratio is too large for the
/// D^+-1/2 scaling to be accurate, P(t) is computed by scaling and squaring
/// instead.
class MarkovProcess {
public:
    enum class Method { Spectral, ScalingSquaring };

    /// Throws Disconnected for a graph with more than one component.
    explicit MarkovProcess(const simgraph::SparseGraph& graph, Method method = Method::Spectral);
    explicit MarkovProcess(const Eigen::MatrixXd& adjacency, Method method = Method::Spectral);

    std::size_t size() const noexcept { return static_cast<std::size_t>(pi_.size()); }
    const Eigen::VectorXd& degrees() const noexcept { return degrees_; }
    const Eigen::VectorXd& pi() const noexcept { return pi_; }
    Method method() const noexcept { return method_; }
    /// I - D^-1 A.
    Eigen::MatrixXd laplacian() const;
    /// Eigenvalues of the normalized Laplacian, ascending, clamped to [0, 2].
    const Eigen::VectorXd& laplacian_spectrum() const noexcept { return lambda_; }

    /// P(t); entries of rounding size below zero are set to zero.
    Eigen::MatrixXd transition(double t) const;
    /// diag(pi) P(t). Symmetric by construction; negative rounding clamped to zero.
    Eigen::MatrixXd flow(double t) const;
    /// diag(pi) P(t) - pi pi^T, symmetric. The spectral route sums only the
    /// non-stationary modes, so entries that vanish analytically come out at
    /// their true size instead of as the rounding error of a difference.
    Eigen::MatrixXd autocovariance(double t) const;

private:
    void init(const Eigen::MatrixXd& adjacency, Method method);

    Method method_ = Method::Spectral;
    Eigen::MatrixXd adjacency_;
    Eigen::VectorXd degrees_;
    Eigen::VectorXd pi_;
    Eigen::VectorXd sqrt_d_;
    Eigen::MatrixXd u_;        // eigenvectors of D^-1/2 A D^-1/2
    Eigen::VectorXd lambda_;   // 1 - mu
    double volume_ = 0.0;
};

/// Degree ratio above which the spectral route hands over to scaling and squaring.
inline constexpr double kSpectralDegreeRatio = 1e8;

MarkovProcess build_markov_process(const simgraph::SparseGraph& graph);
Eigen::MatrixXd transition_kernel(const MarkovProcess& process, double t);

struct AutocovarianceView {
    Eigen::MatrixXd r;  ///< H^T (diag(pi) P - pi pi^T) H
    double markov_time = 0.0;
};

AutocovarianceView clustered_autocovariance(const MarkovProcess& process, const Eigen::MatrixXd& p_t,
                                            const Partition& partition, double t = 0.0);

/// trace(R).
double markov_stability(const AutocovarianceView& view);

/// Sum of B(i, j) over node pairs that share a cluster, for B = diag(pi) P(t) - pi pi^T.
double stability_from_autocovariance(const Eigen::MatrixXd& b, const Partition& partition);

}  // namespace textgraph::mstability
