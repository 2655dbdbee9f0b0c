#pragma once

// Fourier-multiplier operators on SpectralField: derivatives, the Riesz
// potential/solenoidal projections G and S, dealiased convection, the sharp
// spectral mollifier, norms and seeded random solenoidal fields.

#include <cstdint>

#include "chaos_ns/spectral_field.hpp"

namespace chaos_ns {

SpectralField partial(const SpectralField& f, int axis);
ScalarSpectralField partial(const ScalarSpectralField& f, int axis);
SpectralField gradient(const ScalarSpectralField& f);

/// G: symbol k k^T / |k|^2, zero at k = 0.
SpectralField potential_project(const SpectralField& v);
/// S = I - G: passes the mean unchanged; output is flagged divergence-free.
SpectralField leray_project(const SpectralField& v);
/// Mutation-test hook: flips the sign of the k k^T / |k|^2 term in S.
void inject_leray_sign_fault(bool enabled) noexcept;

/// In-place S on raw component spans.
void leray_project_inplace(const Grid& grid, std::span<Complex> c0, std::span<Complex> c1);

ScalarSpectralField divergence(const SpectralField& v);
/// max_k |sum_l i k_l v_hat^l(k)|, the divergence measured in coefficient amplitude.
double max_divergence(const SpectralField& v);

/// Zero every mode with some |k_j| > floor(n/3).
SpectralField dealias(const SpectralField& v);

/// Dealiased (u . grad) v without projection.
SpectralField advection(const SpectralField& u, const SpectralField& v);

/// S[(u . grad) v] with 2/3-rule filtering of the inputs and the product.
/// Throws NotDivergenceFree unless u carries the divergence-free flag.
SpectralField convect(const SpectralField& u, const SpectralField& v);

/// Sharp low-pass: zero every mode with |k|_inf > cutoff.
SpectralField mollify(const SpectralField& v, int cutoff);

/// Laplacian symbol -|k|^2 (Nyquist included).
SpectralField laplacian(const SpectralField& v);

double inner(const SpectralField& f, const SpectralField& g);

struct FieldNorms {
  double l2 = 0.0;
  double h1_seminorm = 0.0;
  double l4 = 0.0;
};

/// l2 and |grad v|_2 by Parseval; l4 by quadrature on a 2x zero-padded grid,
/// which is exact for fields without Nyquist content.
FieldNorms norms(const SpectralField& v);
double l2_norm(const SpectralField& v);
double h1_seminorm(const SpectralField& v);

/// Seeded mean-zero solenoidal field with |v_hat(k)| ~ (1 + |k|^2)^(-decay/2)
/// on the modes 0 < |k|_inf <= max_wave (default: everything below Nyquist).
SpectralField random_divfree_field(const Grid& grid, double decay_exponent, std::uint64_t seed, int max_wave = -1);

/// A pure gradient field grad(phi) with random phi (same spectrum shape).
SpectralField random_gradient_field(const Grid& grid, double decay_exponent, std::uint64_t seed, int max_wave = -1);

/// Unit-amplitude Taylor-Green field (sin x cos y, -cos x sin y) scaled by `amplitude`
/// (on a 2*pi periodic grid; wave index 1 in general).
SpectralField taylor_green(const Grid& grid, double amplitude = 1.0);

}  // namespace chaos_ns
