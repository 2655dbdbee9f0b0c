#include "chaos_ns/spectral_ops.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "chaos_ns/errors.hpp"
#include "chaos_ns/rng.hpp"

namespace chaos_ns {

namespace {

constexpr Complex kI{0.0, 1.0};

template <class Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
  const int n = g.n();
  const int h = g.half();
  for (int row = 0; row < n; ++row) {
    const int kx = g.wave_index(row);
    for (int col = 0; col < h; ++col) fn(row, col, kx, col, g.index(row, col));
  }
}

bool in_band(const Grid& g, int kx, int ky) {
  const int lim = g.dealias_limit();
  return std::abs(kx) <= lim && std::abs(ky) <= lim;
}

}  // namespace

SpectralField partial(const SpectralField& f, int axis) {
  if (axis < 0 || axis >= Grid::kDim) throw Error(ErrorCode::InvalidArgument, "axis out of range");
  const Grid& g = f.grid();
  SpectralField out(g);
  for_each_mode(g, [&](int, int, int kx, int ky, std::size_t i) {
    const double k = g.odd_wavenumber(axis == 0 ? kx : ky);
    for (int l = 0; l < Grid::kDim; ++l) out.component(l)[i] = kI * k * f.component(l)[i];
  });
  out.set_divergence_free(f.divergence_free());
  return out;
}

ScalarSpectralField partial(const ScalarSpectralField& f, int axis) {
  if (axis < 0 || axis >= Grid::kDim) throw Error(ErrorCode::InvalidArgument, "axis out of range");
  const Grid& g = f.grid();
  ScalarSpectralField out(g);
  for_each_mode(g, [&](int, int, int kx, int ky, std::size_t i) {
    out.coeffs()[i] = kI * g.odd_wavenumber(axis == 0 ? kx : ky) * f.coeffs()[i];
  });
  return out;
}

SpectralField gradient(const ScalarSpectralField& f) {
  const Grid& g = f.grid();
  SpectralField out(g);
  for_each_mode(g, [&](int, int, int kx, int ky, std::size_t i) {
    out.component(0)[i] = kI * g.odd_wavenumber(kx) * f.coeffs()[i];
    out.component(1)[i] = kI * g.odd_wavenumber(ky) * f.coeffs()[i];
  });
  out.set_divergence_free(false);
  return out;
}

namespace {
std::atomic<bool> g_leray_sign_fault{false};
}

void inject_leray_sign_fault(bool enabled) noexcept { g_leray_sign_fault.store(enabled, std::memory_order_relaxed); }

void leray_project_inplace(const Grid& g, std::span<Complex> c0, std::span<Complex> c1) {
  const double sign = g_leray_sign_fault.load(std::memory_order_relaxed) ? -1.0 : 1.0;
  for_each_mode(g, [&](int, int, int kx, int ky, std::size_t i) {
    const double k0 = g.odd_wavenumber(kx);
    const double k1 = g.odd_wavenumber(ky);
    const double kk = k0 * k0 + k1 * k1;
    if (kk == 0.0) return;
    const Complex dot = sign * (k0 * c0[i] + k1 * c1[i]) / kk;
    c0[i] -= k0 * dot;
    c1[i] -= k1 * dot;
  });
}

SpectralField leray_project(const SpectralField& v) {
  SpectralField out = v;
  leray_project_inplace(out.grid(), out.component(0), out.component(1));
  out.set_divergence_free(true);
  return out;
}

SpectralField potential_project(const SpectralField& v) {
  const Grid& g = v.grid();
  SpectralField out(g);
  for_each_mode(g, [&](int, int, int kx, int ky, std::size_t i) {
    const double k0 = g.odd_wavenumber(kx);
    const double k1 = g.odd_wavenumber(ky);
    const double kk = k0 * k0 + k1 * k1;
    if (kk == 0.0) return;
    const Complex dot = (k0 * v.component(0)[i] + k1 * v.component(1)[i]) / kk;
    out.component(0)[i] = k0 * dot;
    out.component(1)[i] = k1 * dot;
  });
  out.set_divergence_free(false);
  return out;
}

ScalarSpectralField divergence(const SpectralField& v) {
  const Grid& g = v.grid();
  ScalarSpectralField out(g);
  for_each_mode(g, [&](int, int, int kx, int ky, std::size_t i) {
    out.coeffs()[i] = kI * (g.odd_wavenumber(kx) * v.component(0)[i] + g.odd_wavenumber(ky) * v.component(1)[i]);
  });
  return out;
}

double max_divergence(const SpectralField& v) {
  const ScalarSpectralField d = divergence(v);
  double worst = 0.0;
  for (const auto& c : d.coeffs()) worst = std::max(worst, std::abs(c));
  return worst;
}

SpectralField dealias(const SpectralField& v) {
  const Grid& g = v.grid();
  SpectralField out = v;
  for_each_mode(g, [&](int, int, int kx, int ky, std::size_t i) {
    if (!in_band(g, kx, ky)) {
      out.component(0)[i] = Complex{};
      out.component(1)[i] = Complex{};
    }
  });
  return out;
}

SpectralField convect(const SpectralField& u, const SpectralField& v) {
  if (!u.divergence_free()) throw Error(ErrorCode::NotDivergenceFree, "convect() needs a divergence-free advecting field");
  return leray_project(advection(u, v));
}

SpectralField advection(const SpectralField& u, const SpectralField& v) {
  if (!(u.grid() == v.grid())) throw Error(ErrorCode::ShapeMismatch, "fields live on different grids");
  const Grid& g = u.grid();
  const VectorSamples vel = to_grid(dealias(u));
  const SpectralField vd = dealias(v);
  const VectorSamples dx = to_grid(partial(vd, 0));
  const VectorSamples dy = to_grid(partial(vd, 1));
  VectorSamples prod(g);
  for (int l = 0; l < Grid::kDim; ++l) {
    auto& p = prod.components[static_cast<std::size_t>(l)];
    const auto& ax = dx.components[static_cast<std::size_t>(l)];
    const auto& ay = dy.components[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = vel.components[0][i] * ax[i] + vel.components[1][i] * ay[i];
  }
  return dealias(from_grid(prod));
}

SpectralField mollify(const SpectralField& v, int cutoff) {
  if (cutoff < 0) throw Error(ErrorCode::InvalidArgument, "mollifier cutoff must be >= 0");
  const Grid& g = v.grid();
  SpectralField out = v;
  for_each_mode(g, [&](int, int, int kx, int ky, std::size_t i) {
    if (std::max(std::abs(kx), std::abs(ky)) > cutoff) {
      out.component(0)[i] = Complex{};
      out.component(1)[i] = Complex{};
    }
  });
  return out;
}

SpectralField laplacian(const SpectralField& v) {
  const Grid& g = v.grid();
  SpectralField out(g);
  for_each_mode(g, [&](int, int, int kx, int ky, std::size_t i) {
    const double kx2 = g.wavenumber(kx) * g.wavenumber(kx);
    const double ky2 = g.wavenumber(ky) * g.wavenumber(ky);
    for (int l = 0; l < Grid::kDim; ++l) out.component(l)[i] = -(kx2 + ky2) * v.component(l)[i];
  });
  out.set_divergence_free(v.divergence_free());
  return out;
}

double inner(const SpectralField& f, const SpectralField& h) {
  if (!(f.grid() == h.grid())) throw Error(ErrorCode::ShapeMismatch, "fields live on different grids");
  const Grid& g = f.grid();
  double sum = 0.0;
  for_each_mode(g, [&](int, int col, int, int, std::size_t i) {
    const double w = g.column_weight(col);
    for (int l = 0; l < Grid::kDim; ++l) sum += w * std::real(f.component(l)[i] * std::conj(h.component(l)[i]));
  });
  return sum * g.length() * g.length();
}

double l2_norm(const SpectralField& v) {
  const double s = inner(v, v);
  return std::sqrt(s < 0.0 ? 0.0 : s);  // NaN must propagate
}

double h1_seminorm(const SpectralField& v) {
  const Grid& g = v.grid();
  double sum = 0.0;
  for_each_mode(g, [&](int, int col, int kx, int ky, std::size_t i) {
    const double k0 = g.odd_wavenumber(kx);
    const double k1 = g.odd_wavenumber(ky);
    const double w = g.column_weight(col) * (k0 * k0 + k1 * k1);
    for (int l = 0; l < Grid::kDim; ++l) sum += w * std::norm(v.component(l)[i]);
  });
  return std::sqrt(sum) * g.length();
}

namespace {

// Quadrature of |v|^4 on a grid of size 2n. The Nyquist row and column of the
// source grid are split evenly between +n/2 and -n/2 so the interpolant is real.
double l4_padded(const SpectralField& v) {
  const Grid& g = v.grid();
  const Grid fine(2 * g.n(), g.length());
  const int nyq = g.n() / 2;
  std::array<std::vector<Complex>, Grid::kDim> padded{std::vector<Complex>(fine.spectral_size()),
                                                      std::vector<Complex>(fine.spectral_size())};
  for_each_mode(g, [&](int, int col, int kx, int ky, std::size_t i) {
    double w = 1.0;
    if (ky == nyq) w *= 0.5;
    const bool row_nyq = kx == nyq;
    if (row_nyq) w *= 0.5;
    for (int l = 0; l < Grid::kDim; ++l) {
      const Complex c = w * v.component(l)[i];
      padded[static_cast<std::size_t>(l)][fine.index(fine.row_of(kx), col)] += c;
      if (row_nyq) padded[static_cast<std::size_t>(l)][fine.index(fine.row_of(-kx), col)] += c;
    }
  });
  std::array<std::vector<double>, Grid::kDim> phys{std::vector<double>(fine.physical_size()),
                                                   std::vector<double>(fine.physical_size())};
  for (int l = 0; l < Grid::kDim; ++l) fine.inverse(padded[static_cast<std::size_t>(l)], phys[static_cast<std::size_t>(l)]);
  double sum = 0.0;
  for (std::size_t i = 0; i < fine.physical_size(); ++i) {
    const double m2 = phys[0][i] * phys[0][i] + phys[1][i] * phys[1][i];
    sum += m2 * m2;
  }
  const double cell = (g.length() / fine.n()) * (g.length() / fine.n());
  return std::pow(sum * cell, 0.25);
}

}  // namespace

FieldNorms norms(const SpectralField& v) { return FieldNorms{l2_norm(v), h1_seminorm(v), l4_padded(v)}; }

namespace {

// Hermitian scalar potential with amplitude shape (1+|k|^2)^(-decay/2) / |k|.
ScalarSpectralField random_potential(const Grid& g, double decay, std::uint64_t seed, int max_wave) {
  if (!(decay > 0.0)) throw Error(ErrorCode::InvalidArgument, "decay exponent must be positive");
  if (max_wave < 0) max_wave = g.n() / 2 - 1;
  max_wave = std::min(max_wave, g.n() / 2 - 1);
  ScalarSpectralField psi(g);
  CounterRng rng(seed, 0x5eed);
  for_each_mode(g, [&](int, int, int kx, int ky, std::size_t i) {
    const double re = rng.normal();
    const double im = rng.normal();
    if (std::max(std::abs(kx), std::abs(ky)) > max_wave) return;
    if (kx == 0 && ky == 0) return;
    const double k0 = g.wavenumber(kx), k1 = g.wavenumber(ky);
    const double k2 = k0 * k0 + k1 * k1;
    const double amp = std::pow(1.0 + k2, -0.5 * decay) / std::sqrt(k2);
    psi.coeffs()[i] = amp * Complex(re, im) / std::sqrt(2.0);
  });
  // Column 0 holds both k and -k: keep the kx > 0 half and mirror it.
  for (int kx = 1; kx < g.n() / 2; ++kx) {
    psi(g.row_of(-kx), 0) = std::conj(psi(g.row_of(kx), 0));
  }
  return psi;
}

}  // namespace

SpectralField random_divfree_field(const Grid& g, double decay_exponent, std::uint64_t seed, int max_wave) {
  const ScalarSpectralField psi = random_potential(g, decay_exponent, seed, max_wave);
  SpectralField out(g);
  for_each_mode(g, [&](int, int, int kx, int ky, std::size_t i) {
    out.component(0)[i] = -kI * g.odd_wavenumber(ky) * psi.coeffs()[i];
    out.component(1)[i] = kI * g.odd_wavenumber(kx) * psi.coeffs()[i];
  });
  out.set_divergence_free(true);
  return out;
}

SpectralField random_gradient_field(const Grid& g, double decay_exponent, std::uint64_t seed, int max_wave) {
  return gradient(random_potential(g, decay_exponent, seed, max_wave));
}

SpectralField taylor_green(const Grid& g, double amplitude) {
  SpectralField out(g);
  const Complex q = Complex(0.0, 0.25) * amplitude;
  out(0, g.row_of(1), 1) = -q;
  out(0, g.row_of(-1), 1) = q;
  out(1, g.row_of(1), 1) = q;
  out(1, g.row_of(-1), 1) = q;
  out.set_divergence_free(true);
  return out;
}

}  // namespace chaos_ns
