#pragma once

#include <map>

#include "chaos_ns/multi_index.hpp"

namespace chaos_ns {

/// Probabilists' Hermite polynomial He_n(x) by the three-term recurrence.
double hermite(int n, double x);

/// Gaussian coordinates xi_i^k keyed by slot.
using ChaosCoordinates = std::map<Slot, double>;

/// Unnormalized Wick polynomial: prod over the support of He_{alpha_i^k}(xi_i^k).
double wick_eval(const MultiIndex& alpha, const ChaosCoordinates& xi);

}  // namespace chaos_ns
