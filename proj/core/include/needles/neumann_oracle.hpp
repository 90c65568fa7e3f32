#pragma once

#include <cstddef>
#include <vector>

#include "needles/conformal.hpp"

namespace needles {

/// Discretisation of the exterior Neumann problem around the unit excluded
/// rhombus. The mesh is a tensor grid in lattice coordinates (xi, eta) with
/// x = xi (1, 0) + eta (cos theta, sin theta), so the rhombus is exactly
/// [-1/2, 1/2]^2 and every element is a parallelogram.
struct NeumannOracleOptions {
    double truncation_radius = 40.0;  ///< radius of the disk inscribed in the outer parallelogram
    double spacing = 0.02;            ///< lattice spacing near the rhombus
    double fine_halfwidth = 1.5;      ///< extent of the uniform region, |xi|, |eta| <= fine_halfwidth
    double growth = 1.05;             ///< spacing ratio between neighbouring cells outside it
};

/// u1, u2 with Neumann data on the rhombus and far-field data u_i = x_i on
/// the truncation boundary, plus the derived moment matrices.
struct NeumannSolution {
    double theta = 0.0;
    std::vector<double> grid;  ///< 1-D node coordinates, shared by xi and eta
    std::vector<double> u1;    ///< nodal values, index i + j * grid.size() (xi_i, eta_j); NaN inside the rhombus
    std::vector<double> u2;
    TMatrix t;         ///< rows: closed integral of u_i times the outward rhombus normal
    TMatrix t_energy;  ///< same quantity as |rhombus| I + a(u_i - x_i, u_j - x_j)
    Mat2 q_check;      ///< rows: closed integral of x_i times the outward normal (expected sin(theta) I)
    std::size_t unknowns = 0;
};

/// Solves the two Neumann problems with bilinear finite elements and a
/// sparse LDLT factorisation. Throws ValidationError for theta outside
/// (0, pi) or bad options, NumericalError when the factorisation fails.
NeumannSolution t_matrix_oracle(double theta, const NeumannOracleOptions& options = {});

}  // namespace needles
