#include "chaos_ns_cli/oracles.hpp"

#include <cmath>

#include "chaos_ns/spectral_ops.hpp"

namespace chaos_ns::cli {

namespace {

bool field_is_zero(const FieldSpec& f) { return f.kind == FieldSpec::Kind::Zero; }

bool unforced(const ExperimentConfig& c) {
  return field_is_zero(c.forcing.f) && field_is_zero(c.forcing.f_div[0]) && field_is_zero(c.forcing.f_div[1]);
}

// Multiplies every stored coefficient by factor(kx, ky, lambda-free wave data).
template <class F>
SpectralField scaled(const SpectralField& f, F factor) {
  const Grid& g = f.grid();
  SpectralField out = f;
  for (int row = 0; row < g.n(); ++row) {
    const int wx = g.wave_index(row);
    for (int col = 0; col < g.half(); ++col) {
      const Complex s = factor(wx, col);
      for (int l = 0; l < 2; ++l) out(l, row, col) *= s;
    }
  }
  return out;
}

}  // namespace

bool taylor_green_oracle_applies(const ExperimentConfig& c) {
  return c.forcing.u0.kind == FieldSpec::Kind::TaylorGreen && c.physics.C0 == 0.0 && c.forcing.g.empty() &&
         c.forcing.h.empty() && unforced(c);
}

double taylor_green_energy(const ExperimentConfig& c, double e0, double t) {
  const double k = 2.0 * std::numbers::pi / c.grid.length;
  return e0 * std::exp(-2.0 * c.physics.nu * 2.0 * k * k * t);
}

bool linear_oracle_applies(const ExperimentConfig& c) {
  return !c.flags.convection && c.physics.C0 == 0.0 && c.forcing.h.empty() && unforced(c);
}

LinearReference linear_reference(const Experiment& e, const ExperimentConfig& c, double t) {
  const Grid& g = e.grid;
  const double nu = c.physics.nu;
  const auto b = c.physics.b;
  LinearReference ref{leray_project(e.u0), 0.0, 0.0};
  ref.mean = scaled(ref.mean, [&](int wx, int wy) {
    const double kx = g.wavenumber(wx), ky = g.wavenumber(wy);
    const double lambda = nu * (kx * kx + ky * ky);
    const double phase = (b[0] * g.odd_wavenumber(wx) + b[1] * g.odd_wavenumber(wy)) * t;
    return std::exp(-lambda * t) * Complex(std::cos(phase), std::sin(phase));
  });
  const double m = l2_norm(ref.mean);
  ref.mean_energy = m * m;
  for (int k = 0; k < e.noise.noise_modes(); ++k) {
    const SpectralField gk = leray_project(e.noise.g(k));
    const SpectralField spread = scaled(gk, [&](int wx, int wy) {
      const double kx = g.wavenumber(wx), ky = g.wavenumber(wy);
      const double lambda = nu * (kx * kx + ky * ky);
      const double w = lambda > 0.0 ? (1.0 - std::exp(-2.0 * lambda * t)) / (2.0 * lambda) : t;
      return Complex(std::sqrt(w), 0.0);
    });
    const double s = l2_norm(spread);
    ref.variance += s * s;
  }
  return ref;
}

}  // namespace chaos_ns::cli
