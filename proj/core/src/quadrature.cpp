#include "needles/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "needles/error.hpp"

namespace needles {

QuadratureRule gauss_jacobi(std::size_t n, double alpha, double beta) {
    detail::require(n >= 1, "gauss_jacobi: need at least one node");
    detail::require(alpha > -1.0 && beta > -1.0, "gauss_jacobi: exponents must exceed -1");

    const double ab = alpha + beta;
    // Recurrence coefficients of the monic Jacobi polynomials.
    Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 1));
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double s = 2.0 * kk + ab;
        if (k == 0) {
            diag(0) = (beta - alpha) / (ab + 2.0);
        } else {
            diag(static_cast<Eigen::Index>(k)) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
        }
        if (k + 1 < n) {
            const double m = kk + 1.0;
            const double t = 2.0 * m + ab;
            double ratio = 0.0;
            if (k == 0) {
                // (m + ab) / (t - 1) cancels analytically; avoids 0/0 when alpha + beta = -1
                ratio = 4.0 * (1.0 + alpha) * (1.0 + beta) / (t * t * (t + 1.0));
            } else {
                ratio = 4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (t * t * (t + 1.0) * (t - 1.0));
            }
            sub(static_cast<Eigen::Index>(k)) = std::sqrt(ratio);
        }
    }

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                                std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
    if (n == 1) {
        rule.nodes[0] = diag(0);
        rule.weights[0] = mu0;
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(static_cast<Eigen::Index>(n - 1)), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw NumericalError("gauss_jacobi: eigenvalue solver failed");
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        rule.nodes[k] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

QuadratureRule gauss_legendre(std::size_t n) { return gauss_jacobi(n, 0.0, 0.0); }

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
    QuadratureRule rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    for (std::size_t k = 0; k < n; ++k) {
        rule.nodes[k] = mid + half * rule.nodes[k];
        rule.weights[k] *= half;
    }
    return rule;
}

}  // namespace needles
