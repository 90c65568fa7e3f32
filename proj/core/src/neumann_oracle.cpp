#include "needles/neumann_oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "needles/error.hpp"

namespace needles {

namespace {

std::vector<double> lattice_nodes(const NeumannOracleOptions& o, double half_extent) {
    const auto fine_cells = static_cast<long>(std::llround(o.fine_halfwidth / o.spacing));
    std::vector<double> right;
    for (long k = 0; k <= fine_cells; ++k) right.push_back(o.spacing * static_cast<double>(k));
    double h = o.spacing;
    while (right.back() < half_extent) {
        h *= o.growth;
        const double next = right.back() + h;
        // absorb a sliver at the end into the last cell
        if (next + 0.5 * h * o.growth >= half_extent) {
            right.push_back(half_extent);
            break;
        }
        right.push_back(next);
    }
    std::vector<double> nodes;
    nodes.reserve(2 * right.size() - 1);
    for (auto it = right.rbegin(); it != right.rend(); ++it) nodes.push_back(-*it);
    for (std::size_t k = 1; k < right.size(); ++k) nodes.push_back(right[k]);
    nodes[right.size() - 1] = 0.0;
    return nodes;
}

}  // namespace

NeumannSolution t_matrix_oracle(double theta, const NeumannOracleOptions& o) {
    constexpr double pi = std::numbers::pi;
    detail::require(theta > 0.0 && theta < pi, "t_matrix_oracle: relative angle outside (0, pi)");
    detail::require(o.spacing > 0.0 && o.growth >= 1.0 && o.fine_halfwidth > 0.5 &&
                        o.truncation_radius > o.fine_halfwidth,
                    "t_matrix_oracle: invalid mesh options");
    const double half_cells = 0.5 / o.spacing;
    detail::require(std::abs(half_cells - std::round(half_cells)) < 1e-9,
                    "t_matrix_oracle: spacing must divide the half side 1/2");

    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double extent = o.truncation_radius / s;
    const std::vector<double> g = lattice_nodes(o, extent);
    const std::size_t n = g.size();
    auto id = [n](std::size_t i, std::size_t j) { return i + j * n; };

    // node classification: rhombus interior (excluded), outer boundary (Dirichlet), free
    constexpr double tol = 1e-12;
    auto in_hole = [&](std::size_t i, std::size_t j) {
        return std::abs(g[i]) < 0.5 - tol && std::abs(g[j]) < 0.5 - tol;
    };
    std::vector<long> unknown(n * n, -1);
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const bool outer = (i == 0 || j == 0 || i + 1 == n || j + 1 == n);
            if (!outer && !in_hole(i, j)) unknown[id(i, j)] = static_cast<long>(count++);
        }
    }

    // metric of the lattice map: gradient energy = grad_l^T G grad_l * det
    const double g11 = 1.0 + c * c / (s * s);
    const double g12 = -c / (s * s);
    const double g22 = 1.0 / (s * s);
    const double det = s;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(count * 9);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count), 2);
    auto exact = [&](std::size_t i, std::size_t j) { return std::array<double, 2>{g[i] + c * g[j], s * g[j]}; };

    const double gp = 0.5 / std::sqrt(3.0);
    const double gauss[2] = {0.5 - gp, 0.5 + gp};
    // local nodes (0,0), (1,0), (1,1), (0,1) on the unit square
    const int lr[4] = {0, 1, 1, 0};
    const int lt[4] = {0, 0, 1, 1};
    for (std::size_t j = 0; j + 1 < n; ++j) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double cx = 0.5 * (g[i] + g[i + 1]);
            const double cy = 0.5 * (g[j] + g[j + 1]);
            if (std::abs(cx) < 0.5 && std::abs(cy) < 0.5) continue;
            const double hx = g[i + 1] - g[i];
            const double hy = g[j + 1] - g[j];
            double ke[4][4] = {};
            for (double r : gauss) {
                for (double t : gauss) {
                    double dx[4], dy[4];
                    for (int a = 0; a < 4; ++a) {
                        const double sr = lr[a] ? 1.0 : -1.0;
                        const double st = lt[a] ? 1.0 : -1.0;
                        dx[a] = sr * (lt[a] ? t : 1.0 - t) / hx;
                        dy[a] = st * (lr[a] ? r : 1.0 - r) / hy;
                    }
                    for (int a = 0; a < 4; ++a) {
                        for (int b = 0; b < 4; ++b) {
                            ke[a][b] += 0.25 * det * hx * hy *
                                        (g11 * dx[a] * dx[b] + g12 * (dx[a] * dy[b] + dy[a] * dx[b]) + g22 * dy[a] * dy[b]);
                        }
                    }
                }
            }
            std::size_t nodes[4][2];
            for (int a = 0; a < 4; ++a) {
                nodes[a][0] = i + static_cast<std::size_t>(lr[a]);
                nodes[a][1] = j + static_cast<std::size_t>(lt[a]);
            }
            for (int a = 0; a < 4; ++a) {
                const long ra = unknown[id(nodes[a][0], nodes[a][1])];
                if (ra < 0) continue;
                for (int b = 0; b < 4; ++b) {
                    const long cb = unknown[id(nodes[b][0], nodes[b][1])];
                    if (cb >= 0) {
                        triplets.emplace_back(ra, cb, ke[a][b]);
                    } else {
                        const auto xb = exact(nodes[b][0], nodes[b][1]);
                        rhs(ra, 0) -= ke[a][b] * xb[0];
                        rhs(ra, 1) -= ke[a][b] * xb[1];
                    }
                }
            }
        }
    }

    Eigen::SparseMatrix<double> k(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
    k.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(k);
    if (solver.info() != Eigen::Success) throw NumericalError("t_matrix_oracle: sparse factorisation failed");
    const Eigen::MatrixXd sol = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !sol.allFinite()) throw NumericalError("t_matrix_oracle: solve failed");

    NeumannSolution out;
    out.theta = theta;
    out.grid = g;
    out.unknowns = count;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.u1.assign(n * n, nan);
    out.u2.assign(n * n, nan);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const long u = unknown[id(i, j)];
            if (u >= 0) {
                out.u1[id(i, j)] = sol(u, 0);
                out.u2[id(i, j)] = sol(u, 1);
            } else if (!in_hole(i, j)) {
                const auto x = exact(i, j);
                out.u1[id(i, j)] = x[0];
                out.u2[id(i, j)] = x[1];
            }
        }
    }

    // rhombus edges in lattice coordinates; u is linear along each cell edge,
    // so the trapezoidal rule integrates the discrete solution exactly
    const auto lo = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), -0.5 - tol) - g.begin());
    const auto hi = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), 0.5 - tol) - g.begin());
    auto edge_integral = [&](const std::vector<double>& f, bool along_xi, std::size_t fixed) {
        double sum = 0.0;
        for (std::size_t m = lo; m < hi; ++m) {
            const double fa = along_xi ? f[id(m, fixed)] : f[id(fixed, m)];
            const double fb = along_xi ? f[id(m + 1, fixed)] : f[id(fixed, m + 1)];
            sum += 0.5 * (fa + fb) * (g[m + 1] - g[m]);
        }
        return sum;  // edge length element is |e1| = |e2| = 1
    };
    auto moment = [&](const std::vector<double>& f) {
        const double top = edge_integral(f, true, hi);
        const double bottom = edge_integral(f, true, lo);
        const double right = edge_integral(f, false, hi);
        const double left = edge_integral(f, false, lo);
        // outward normals: top (0, 1), bottom (0, -1), right (s, -c), left (-s, c)
        return std::array<double, 2>{s * (right - left), (top - bottom) - c * (right - left)};
    };
    const auto row1 = moment(out.u1);
    const auto row2 = moment(out.u2);
    out.t = {row1[0], 0.5 * (row1[1] + row2[0]), row2[1]};

    std::vector<double> x1(n * n), x2(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = exact(i, j);
            x1[id(i, j)] = x[0];
            x2[id(i, j)] = x[1];
        }
    }
    const auto q1 = moment(x1);
    const auto q2 = moment(x2);
    out.q_check = {q1[0], q1[1], q2[0], q2[1]};

    // energy route: x - u vanishes on the outer boundary, so the added-mass
    // matrix a(u_i - x_i, u_j - x_j) only involves the free-free block
    Eigen::VectorXd ud1(static_cast<Eigen::Index>(count)), ud2(static_cast<Eigen::Index>(count));
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(count); ++r) {
        ud1(r) = sol(r, 0);
        ud2(r) = sol(r, 1);
    }
    Eigen::VectorXd xf1(static_cast<Eigen::Index>(count)), xf2(static_cast<Eigen::Index>(count));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const long u = unknown[id(i, j)];
            if (u < 0) continue;
            const auto x = exact(i, j);
            xf1(u) = x[0];
            xf2(u) = x[1];
        }
    }
    const Eigen::VectorXd p1 = xf1 - ud1;
    const Eigen::VectorXd p2 = xf2 - ud2;
    const Eigen::VectorXd kp1 = k * p1;
    const Eigen::VectorXd kp2 = k * p2;
    out.t_energy = {s + p1.dot(kp1), 0.5 * (p1.dot(kp2) + p2.dot(kp1)), s + p2.dot(kp2)};
    return out;
}

}  // namespace needles
