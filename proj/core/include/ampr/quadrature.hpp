#pragma once

#include <vector>

namespace ampr {

/// Nodes and weights of a quadrature rule.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const noexcept { return nodes.size(); }
};

/**
 * Gauss-Hermite rule for the standard normal measure Dz (weights sum to 1),
 * built by Golub-Welsch from the probabilists' Hermite recurrence.
 * Throws ConfigError for order < 1.
 */
QuadratureRule gauss_hermite_normal(int order);

}  // namespace ampr
