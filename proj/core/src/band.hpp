#pragma once

// Internal helpers for pseudo-spectral products on raw coefficient spans.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <span>
#include <vector>

#include "chaos_ns/grid.hpp"
#include "chaos_ns/spectral_field.hpp"

namespace chaos_ns::detail {

using Plane = std::vector<double>;
using PhysicalVector = std::array<Plane, 2>;
using PhysicalGradient = std::array<Plane, 4>;  // d_x u0, d_y u0, d_x u1, d_y u1

inline bool in_band(const Grid& g, int kx, int ky) {
  const int lim = g.dealias_limit();
  return std::abs(kx) <= lim && std::abs(ky) <= lim;
}

inline void band_filter(const Grid& g, std::span<Complex> c) {
  for (int row = 0; row < g.n(); ++row) {
    const int kx = g.wave_index(row);
    for (int col = 0; col < g.half(); ++col)
      if (!in_band(g, kx, col)) c[g.index(row, col)] = Complex{};
  }
}

inline void cutoff_filter(const Grid& g, std::span<Complex> c, int cutoff) {
  for (int row = 0; row < g.n(); ++row) {
    const int kx = g.wave_index(row);
    for (int col = 0; col < g.half(); ++col)
      if (std::max(std::abs(kx), col) > cutoff) c[g.index(row, col)] = Complex{};
  }
}

/// Band-limited physical samples of f.
PhysicalVector physical_of(const SpectralField& f);

/// Band-limited physical gradient of f.
void physical_gradient(const SpectralField& f, PhysicalGradient& out, std::vector<Complex>& scratch);

/// acc^l += s * (v . grad) w^l pointwise.
void accumulate_advection(const PhysicalVector& v, const PhysicalGradient& grad_w, double s, PhysicalVector& acc);

/// Forward transform, band filter and Leray projection of a physical accumulator.
SpectralField project_physical(const Grid& g, const PhysicalVector& acc);

/// A vector field with few Fourier modes, stored over the full lattice.
struct SparseVectorField {
  struct Term {
    std::array<int, 2> wave;
    std::array<Complex, 2> coeff;
  };
  std::vector<Term> terms;
};

/// Full-lattice listing of f when it has at most `max_terms` nonzero waves.
bool sparse_of(const SpectralField& f, std::size_t max_terms, SparseVectorField& out);

/// sum_k c_k s_k, merging equal waves.
SparseVectorField combine(std::span<const SparseVectorField> fields, std::span<const double> weights);

/// S[band((s . grad) w)] by direct convolution over the support of s.
SpectralField sparse_transport(const SparseVectorField& s, const SpectralField& w);

}  // namespace chaos_ns::detail
