#pragma once

#include <cstddef>
#include <vector>

namespace needles {

/// Nodes and weights of an interpolatory rule on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Jacobi rule for the weight (1 - x)^alpha (1 + x)^beta,
/// alpha, beta > -1, computed by Golub-Welsch.
QuadratureRule gauss_jacobi(std::size_t n, double alpha, double beta);

/// n-point Gauss-Legendre rule.
QuadratureRule gauss_legendre(std::size_t n);

/// Gauss-Legendre rule affinely mapped to [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

}  // namespace needles
