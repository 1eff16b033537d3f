#include "textgraph/mstability/markov.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "textgraph/common/error.hpp"

namespace textgraph::mstability {

namespace {

bool connected(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    if (n == 0) return true;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> stack{0};
    seen[0] = true;
    Eigen::Index reached = 1;
    while (!stack.empty()) {
        const Eigen::Index v = stack.back();
        stack.pop_back();
        for (Eigen::Index u = 0; u < n; ++u) {
            if (a(v, u) > 0.0 && !seen[static_cast<std::size_t>(u)]) {
                seen[static_cast<std::size_t>(u)] = true;
                ++reached;
                stack.push_back(u);
            }
        }
    }
    return reached == n;
}

void clamp_negative(Eigen::MatrixXd& m) { m = m.cwiseMax(0.0); }

}  // namespace

MarkovProcess::MarkovProcess(const simgraph::SparseGraph& graph, Method method) {
    init(graph.dense_adjacency(), method);
}

MarkovProcess::MarkovProcess(const Eigen::MatrixXd& adjacency, Method method) { init(adjacency, method); }

void MarkovProcess::init(const Eigen::MatrixXd& adjacency, Method method) {
    const Eigen::Index n = adjacency.rows();
    if (adjacency.cols() != n) throw InvalidArgument("adjacency must be square");
    if (n == 0) throw InvalidArgument("empty graph");
    if ((adjacency - adjacency.transpose()).cwiseAbs().maxCoeff() > 0.0)
        throw InvalidArgument("adjacency must be symmetric");
    if (adjacency.minCoeff() < 0.0) throw InvalidArgument("edge weights must be non-negative");
    if (adjacency.diagonal().cwiseAbs().maxCoeff() > 0.0) throw InvalidArgument("self-loops are not supported");
    if (n > 1 && !connected(adjacency)) throw Disconnected("graph has more than one connected component");

    adjacency_ = adjacency;
    degrees_ = adjacency.rowwise().sum();
    if (n == 1) degrees_(0) = 1.0;
    volume_ = degrees_.sum();
    pi_ = degrees_ / volume_;
    sqrt_d_ = degrees_.cwiseSqrt();

    method_ = method;
    if (method_ == Method::Spectral && degrees_.maxCoeff() / degrees_.minCoeff() > kSpectralDegreeRatio)
        method_ = Method::ScalingSquaring;

    const Eigen::VectorXd inv_sqrt_d = sqrt_d_.cwiseInverse();
    const Eigen::MatrixXd m = inv_sqrt_d.asDiagonal() * adjacency * inv_sqrt_d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
    if (eig.info() != Eigen::Success) throw InvalidArgument("eigendecomposition failed");
    // mu descending gives lambda = 1 - mu ascending
    u_ = eig.eigenvectors().rowwise().reverse();
    lambda_ = (Eigen::VectorXd::Ones(n) - eig.eigenvalues().reverse()).cwiseMax(0.0).cwiseMin(2.0);
    if (n == 1) lambda_(0) = 0.0;
}

Eigen::MatrixXd MarkovProcess::laplacian() const {
    const Eigen::Index n = adjacency_.rows();
    Eigen::MatrixXd l = -(degrees_.cwiseInverse().asDiagonal() * adjacency_);
    l.diagonal() += Eigen::VectorXd::Ones(n);
    return l;
}

Eigen::MatrixXd MarkovProcess::transition(double t) const {
    if (t < 0.0) throw InvalidArgument("Markov time must be non-negative");
    const Eigen::Index n = pi_.size();
    if (t == 0.0) return Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd p;
    if (method_ == Method::ScalingSquaring) {
        p = (-t * laplacian()).exp();
    } else {
        // the stationary mode contributes 1 pi^T exactly
        const Eigen::VectorXd e = (-t * lambda_.tail(n - 1)).array().exp();
        const Eigen::MatrixXd& u = u_.rightCols(n - 1);
        p = sqrt_d_.cwiseInverse().asDiagonal() * (u * e.asDiagonal() * u.transpose()) * sqrt_d_.asDiagonal();
        p.rowwise() += pi_.transpose();
    }
    clamp_negative(p);
    return p;
}

Eigen::MatrixXd MarkovProcess::autocovariance(double t) const {
    if (t < 0.0) throw InvalidArgument("Markov time must be non-negative");
    const Eigen::Index n = pi_.size();
    Eigen::MatrixXd b;
    if (method_ == Method::ScalingSquaring) {
        b = pi_.asDiagonal() * (-t * laplacian()).exp();
        b -= pi_ * pi_.transpose();
    } else {
        const Eigen::VectorXd half = (-0.5 * t * lambda_.tail(n - 1)).array().exp();
        const Eigen::MatrixXd w = sqrt_d_.asDiagonal() * u_.rightCols(n - 1) * half.asDiagonal();
        b = (w * w.transpose()) / volume_;
    }
    return 0.5 * (b + b.transpose());
}

Eigen::MatrixXd MarkovProcess::flow(double t) const {
    if (t < 0.0) throw InvalidArgument("Markov time must be non-negative");
    if (t == 0.0) return Eigen::MatrixXd(pi_.asDiagonal());
    Eigen::MatrixXd f = autocovariance(t) + pi_ * pi_.transpose();
    clamp_negative(f);
    return f;
}

MarkovProcess build_markov_process(const simgraph::SparseGraph& graph) { return MarkovProcess(graph); }

Eigen::MatrixXd transition_kernel(const MarkovProcess& process, double t) { return process.transition(t); }

AutocovarianceView clustered_autocovariance(const MarkovProcess& process, const Eigen::MatrixXd& p_t,
                                            const Partition& partition, double t) {
    const auto n = static_cast<Eigen::Index>(process.size());
    if (p_t.rows() != n || p_t.cols() != n || partition.size() != process.size())
        throw SizeMismatch("kernel, process and partition sizes differ");
    const auto c = static_cast<Eigen::Index>(partition.num_clusters());
    const Eigen::VectorXd& pi = process.pi();
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(c, c);
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(c);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto a = static_cast<Eigen::Index>(partition[static_cast<std::size_t>(i)]);
        mass(a) += pi(i);
        for (Eigen::Index j = 0; j < n; ++j) r(a, partition[static_cast<std::size_t>(j)]) += pi(i) * p_t(i, j);
    }
    r -= mass * mass.transpose();
    return {r, t};
}

double markov_stability(const AutocovarianceView& view) { return view.r.trace(); }

double stability_from_autocovariance(const Eigen::MatrixXd& b, const Partition& partition) {
    double total = 0.0;
    for (const auto& members : partition.members()) {
        for (std::size_t i : members)
            for (std::size_t j : members) total += b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return total;
}

}  // namespace textgraph::mstability
