#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace needles {

using complex = std::complex<double>;

/// Multiplicative constant a(theta) = a1 + i a2 of the Schwarz-Christoffel map
/// from the unit disk onto the exterior of the unit excluded rhombus.
struct SCConstant {
    double a1 = 0.0;
    double a2 = 0.0;
    double theta = 0.0;
    double error_estimate = 0.0;  ///< achieved error of the quadrature route, 0 for the closed form

    complex value() const { return {a1, a2}; }
};

/// 2x2 matrix, row-major.
struct Mat2 {
    double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;

    /// Eigenvalues in ascending order (the matrix is assumed symmetric).
    std::pair<double, double> symmetric_eigenvalues() const;
};

Mat2 rotation_matrix(double angle);
Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 transpose(const Mat2& a);

/// Excluded-volume matrix T(theta): symmetric, positive definite on (0, pi).
struct TMatrix {
    double t11 = 0.0;
    double t12 = 0.0;
    double t22 = 0.0;

    Mat2 as_matrix() const { return {t11, t12, t12, t22}; }
};

/// Closed form a = alpha / (beta - i gamma) built from Gamma functions and
/// regularised 2F1 at -1. The removable singularity at theta = pi/2 is
/// filled by symmetric Richardson extrapolation. Requires 0 < theta < pi.
SCConstant sc_constant(double theta);

/// a(theta) by Gauss-Jacobi integration of the SC integrand along the chord
/// between the prevertices -1 and -i (images: the top edge A -> B), scaled so
/// that edge has unit horizontal length. Throws NumericalError when two rule
/// sizes disagree beyond 1e-12 relative. Requires 0 < theta < pi.
SCConstant sc_constant_quadrature(double theta);

/// T(theta) = 4 [[a1^2 (pi - theta) + a2^2 theta, a1 a2 (pi - 2 theta)], [., a2^2 (pi - theta) + a1^2 theta]]
/// with a from the quadrature route. Requires 0 < theta < pi.
TMatrix t_matrix(double theta);
TMatrix t_matrix(const SCConstant& a);

/// M(theta1, theta) = R(theta1) T(theta) R(theta1)^T.
Mat2 m_matrix(double theta1, double theta);

/// Complex potentials in the disk: W1 = -(conj(a) zeta + a / zeta),
/// W2 = -i (conj(a) zeta - a / zeta). Requires k in {1, 2} and 0 < |zeta| <= 1.
complex w_solution(int k, complex zeta, double theta);

/// The map g itself: g(zeta) for |zeta| <= 1, zeta != 0, normalised so the
/// prevertices -1, -i, 1, i land on the rhombus vertices A, B, C, D (unit
/// needle, first needle horizontal, centred at the origin).
complex sc_map(complex zeta, double theta);

/// Residues at zeta = 0 of zeta g'(zeta) and g'(zeta) / zeta, measured by the
/// trapezoidal rule on the circle |zeta| = radius.
struct SCResidues {
    complex of_zeta_dg;      ///< expected a(theta)
    complex of_dg_over_zeta; ///< expected (1 - 2 theta / pi) a(theta)
};
SCResidues sc_residues_by_contour(double theta, double radius = 0.5, std::size_t points = 128);

/// Tabulated T over Chebyshev-Lobatto nodes on [0, pi] with barycentric
/// interpolation. Endpoint entries hold the one-sided limits T(0+), T(pi-).
/// For an odd grid size the middle node is exactly pi/2. Immutable after
/// construction.
class TTable {
public:
    explicit TTable(std::size_t grid_size);

    TMatrix operator()(double theta) const;

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<TMatrix>& values() const { return values_; }
    /// Polynomial degree of the interpolant (grid size - 1).
    std::size_t order() const { return grid_.size() - 1; }

private:
    std::vector<double> grid_;
    std::vector<TMatrix> values_;
    std::vector<double> bary_weights_;
};

/// grid_size >= 16.
TTable build_t_table(std::size_t grid_size = 65);

namespace detail {

/// Regularised 2F1(a, b; c; -1) / Gamma(c) evaluated via the Pfaff
/// transformation to argument 1/2. Valid for c > -1.
double regularized_hyp2f1_at_minus_one(double a, double b, double c);

/// Quadrature route including the endpoints theta in {0, pi}, where it yields
/// the one-sided limits.
SCConstant sc_constant_quadrature_closed(double theta, std::size_t nodes = 40);

/// T from a without range checks (theta in [0, pi]).
TMatrix t_matrix_unchecked(double a1, double a2, double theta);

}  // namespace detail
}  // namespace needles
