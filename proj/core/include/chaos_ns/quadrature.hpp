#pragma once

// Gauss rules via Golub-Welsch and the Gaussian-moment oracle for Wick
// polynomial products. The oracle evaluates Hermite polynomials from their
// explicit series, not from the recurrence in hermite.hpp.

#include <vector>

#include "chaos_ns/multi_index.hpp"

namespace chaos_ns {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule exact for polynomials of degree 2n-1 against the standard
/// normal density (weights sum to 1).
QuadratureRule gauss_hermite_normal(int n);

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// He_n(x) from n! sum_m (-1)^m x^(n-2m) / (m! (n-2m)! 2^m).
double hermite_series(int n, double x);

/// E[zeta_alpha zeta_beta zeta_gamma] under i.i.d. N(0,1) coordinates, by
/// tensorized Gauss-Hermite quadrature over the joint support.
double triple_expectation_oracle(const MultiIndex& alpha, const MultiIndex& beta, const MultiIndex& gamma);

}  // namespace chaos_ns
