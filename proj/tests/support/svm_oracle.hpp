#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

namespace textgraph::oracle {

struct BinarySvm {
    Eigen::VectorXd w;
    double b = 0.0;
    double objective = 0.0;
};

// Dual coordinate descent for 0.5 |(w, b)|^2 + c * sum max(0, 1 - y (x w + b)),
// cycling over rows in index order until no coordinate moves by more than tol.
inline BinarySvm dual_coordinate_svm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double c,
                                     double tol = 1e-12, int max_sweeps = 100000) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd xa(n, x.cols() + 1);
    xa << x, Eigen::VectorXd::Ones(n);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(xa.cols());
    const Eigen::VectorXd q = xa.rowwise().squaredNorm();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double largest = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double g = y(i) * xa.row(i).dot(w) - 1.0;
            const double next = std::clamp(alpha(i) - g / q(i), 0.0, c);
            const double d = next - alpha(i);
            if (d != 0.0) {
                w += d * y(i) * xa.row(i).transpose();
                alpha(i) = next;
                largest = std::max(largest, std::abs(d));
            }
        }
        if (largest < tol) break;
    }
    BinarySvm out;
    out.w = w.head(x.cols());
    out.b = w(x.cols());
    const Eigen::ArrayXd margin = y.array() * ((x * out.w).array() + out.b);
    out.objective = 0.5 * w.squaredNorm() + c * (1.0 - margin).max(0.0).sum();
    return out;
}

}  // namespace textgraph::oracle
