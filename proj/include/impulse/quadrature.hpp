#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace impulse {

/// Gauss–Legendre rule on [−1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss–Legendre rule (Newton on P_n); cached per n.
const GaussRule& gauss_legendre(std::size_t n);

enum class NodeLayout { Uniform, Chebyshev };

/// n ≥ 2 nodes on [a, b] including both ends.
std::vector<double> node_layout(NodeLayout layout, double a, double b, std::size_t n);

/// Barycentric weights for interpolation through `x`.
std::vector<double> barycentric_weights(std::span<const double> x);

/// Lagrange interpolation coefficients c_i(t) with p(t) = Σ c_i y_i.
std::vector<double> barycentric_coefficients(std::span<const double> x, std::span<const double> w, double t);

}  // namespace impulse
