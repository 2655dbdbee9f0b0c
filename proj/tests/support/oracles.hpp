#pragma once

// Test-side references built independently of the library code paths:
// Hermite polynomials from explicit integer coefficients, Gaussian moments
// (n-1)!!, and brute-force products over the full Fourier lattice.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "chaos_ns/multi_index.hpp"

namespace chaos_ns::testing {

/// Coefficients c_j of He_n(x) = sum_j c_j x^j, via He_{n+1} = x He_n - n He_{n-1}.
inline std::vector<std::int64_t> hermite_coefficients(int n) {
  std::vector<std::int64_t> prev{1}, cur{0, 1};
  if (n == 0) return prev;
  for (int k = 1; k < n; ++k) {
    std::vector<std::int64_t> next(static_cast<std::size_t>(k) + 2, 0);
    for (std::size_t j = 0; j < cur.size(); ++j) next[j + 1] += cur[j];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= static_cast<std::int64_t>(k) * prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// E[x^n] for x ~ N(0,1).
inline double gaussian_moment(int n) {
  if (n % 2 == 1) return 0.0;
  double r = 1.0;
  for (int k = n - 1; k > 1; k -= 2) r *= k;
  return r;
}

/// E[prod_j He_{orders[j]}(x)] for one standard normal x, by polynomial expansion.
inline double scalar_hermite_product(const std::vector<int>& orders) {
  std::vector<double> poly{1.0};
  for (int n : orders) {
    const auto c = hermite_coefficients(n);
    std::vector<double> next(poly.size() + c.size() - 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j) next[i + j] += poly[i] * static_cast<double>(c[j]);
    poly = std::move(next);
  }
  double e = 0.0;
  for (std::size_t j = 0; j < poly.size(); ++j) e += poly[j] * gaussian_moment(static_cast<int>(j));
  return e;
}

/// E[zeta_a zeta_b zeta_c]: independent slots factor.
inline double triple_product(const MultiIndex& a, const MultiIndex& b, const MultiIndex& c) {
  std::map<Slot, std::vector<int>> slots;
  for (const MultiIndex* m : {&a, &b, &c})
    for (const auto& e : m->entries()) slots[e.slot];
  double r = 1.0;
  for (auto& [slot, orders] : slots) r *= scalar_hermite_product({a.at(slot), b.at(slot), c.at(slot)});
  return r;
}

inline double factorial_double(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

}  // namespace chaos_ns::testing
