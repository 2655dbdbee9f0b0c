#include "chaos_ns/drift_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chaos_ns/errors.hpp"
#include "chaos_ns/spectral_ops.hpp"
#include "band.hpp"

namespace chaos_ns {

namespace {

constexpr Complex kI{0.0, 1.0};

using detail::band_filter;
using detail::cutoff_filter;
using detail::in_band;
using detail::physical_of;
using Plane = detail::Plane;

}  // namespace

SpectralField total_forcing(const Grid& grid, const Forcing& forcing) {
  SpectralField out(grid);
  if (forcing.f) out += *forcing.f;
  for (int j = 0; j < Grid::kDim; ++j)
    if (forcing.f_div[static_cast<std::size_t>(j)]) out += partial(*forcing.f_div[static_cast<std::size_t>(j)], j);
  out.set_divergence_free(false);
  return out;
}

DriftKernel::DriftKernel(const Grid& grid, const IndexSet& set, const CouplingTable& table, const NoiseModel& noise,
                         std::optional<TimeBasis> time_basis, Forcing forcing, DriftOptions options)
    : grid_(grid),
      set_(set),
      noise_(noise),
      time_basis_(std::move(time_basis)),
      forcing_(total_forcing(grid, forcing)),
      options_(options) {
  if (table.size() != set.size()) throw Error(ErrorCode::IndexSetMismatch, "coupling table does not match the index set");
  if (!(noise.grid() == grid)) throw Error(ErrorCode::ShapeMismatch, "noise model lives on a different grid");
  has_forcing_ = forcing.f.has_value() || forcing.f_div[0].has_value() || forcing.f_div[1].has_value();

  table_.resize(set.size());
  decrements_.resize(set.size());
  inv_sqrt_factorial_.resize(set.size());
  for (std::size_t a = 0; a < set.size(); ++a) {
    for (const auto& e : table.row(a))
      table_[a].push_back(WeightedPair{e.beta, e.gamma, boost::rational_cast<double>(e.weight)});
    const MultiIndex& alpha = set[a];
    inv_sqrt_factorial_[a] = 1.0 / std::sqrt(static_cast<double>(alpha.factorial()));
    for (const auto& entry : alpha.entries()) {
      if (entry.slot.noise_mode > noise.noise_modes())
        throw Error(ErrorCode::IndexSetMismatch, "index uses noise mode " + std::to_string(entry.slot.noise_mode) +
                                                     " but the model has " + std::to_string(noise.noise_modes()));
      if (!time_basis_ || entry.slot.time_mode > time_basis_->size())
        throw Error(ErrorCode::IndexSetMismatch, "index uses time mode " + std::to_string(entry.slot.time_mode) +
                                                     " outside the time basis");
      const auto target = set.find(alpha.decrement(entry.slot.time_mode, entry.slot.noise_mode));
      if (target < 0) throw Error(ErrorCode::IndexSetMismatch, "index set is not closed under decrement");
      decrements_[a].push_back(Decrement{entry.slot.time_mode, entry.slot.noise_mode,
                                         static_cast<double>(entry.order), static_cast<std::size_t>(target)});
    }
  }

  for (const auto& s : noise.sigma_fields()) sigma_phys_.push_back(physical_of(s));
  if (noise.has_h()) {
    for (int i = 0; i < Grid::kDim; ++i)
      for (int k = 0; k < noise.noise_modes(); ++k)
        h_phys_[static_cast<std::size_t>(i)].push_back(physical_of(noise.h(i, k)));
  }
}

PhysicalStack DriftKernel::to_physical(std::span<const SpectralField> coeffs, int workers, double* speed_bound) const {
  const std::size_t count = coeffs.size();
  const std::size_t np = grid_.physical_size();
  PhysicalStack phys;
  phys.velocity.resize(count);
  phys.gradient.resize(count);
  std::vector<double> speeds(count, 0.0);

  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic, 1)
  for (std::ptrdiff_t ai = 0; ai < n; ++ai) {
    const auto a = static_cast<std::size_t>(ai);
    const SpectralField& f = coeffs[a];
    std::vector<Complex> scratch(grid_.spectral_size());
    auto& vel = phys.velocity[a];
    auto& grad = phys.gradient[a];
    for (int l = 0; l < Grid::kDim; ++l) {
      const auto comp = f.component(l);
      vel[static_cast<std::size_t>(l)].resize(np);
      std::copy(comp.begin(), comp.end(), scratch.begin());
      band_filter(grid_, scratch);
      if (options_.advect_cutoff >= 0) cutoff_filter(grid_, scratch, options_.advect_cutoff);
      grid_.inverse(scratch, vel[static_cast<std::size_t>(l)]);
      for (int j = 0; j < Grid::kDim; ++j) {
        auto& out = grad[static_cast<std::size_t>(2 * l + j)];
        out.resize(np);
        for (int row = 0; row < grid_.n(); ++row) {
          const int kx = grid_.wave_index(row);
          for (int col = 0; col < grid_.half(); ++col) {
            const std::size_t i = grid_.index(row, col);
            const double k = grid_.odd_wavenumber(j == 0 ? kx : col);
            scratch[i] = in_band(grid_, kx, col) ? kI * k * comp[i] : Complex{};
          }
        }
        grid_.inverse(scratch, out);
      }
    }
    double vmax = 0.0;
    for (std::size_t i = 0; i < np; ++i) vmax = std::max(vmax, std::hypot(vel[0][i], vel[1][i]));
    speeds[a] = vmax * inv_sqrt_factorial_[a];
  }
  if (speed_bound != nullptr) {
    double s = 0.0;
    for (double v : speeds) s += v;
    *speed_bound = s;
  }
  return phys;
}

SpectralField DriftKernel::assemble(const PhysicalStack& phys, std::span<const SpectralField> coeffs, std::size_t a,
                                    double t, bool nonlinear_only) const {
  const std::size_t np = grid_.physical_size();
  std::array<Plane, 2> acc{Plane(np, 0.0), Plane(np, 0.0)};

  if (options_.convection) {
    for (const auto& pair : table_[a]) {
      const auto& u = phys.velocity[pair.gamma];
      const auto& d = phys.gradient[pair.beta];
      const double w = pair.weight;
      for (std::size_t i = 0; i < np; ++i) {
        acc[0][i] -= w * (u[0][i] * d[0][i] + u[1][i] * d[1][i]);
        acc[1][i] -= w * (u[0][i] * d[2][i] + u[1][i] * d[3][i]);
      }
    }
  }

  const MultiIndex& alpha = set_[a];
  if (!nonlinear_only) {
    for (const auto& dec : decrements_[a]) {
      const double coef = time_basis_->value(dec.time_mode, t) * dec.multiplicity;
      const auto& s = sigma_phys_[static_cast<std::size_t>(dec.noise_mode - 1)];
      const auto& d = phys.gradient[dec.target];
      for (std::size_t i = 0; i < np; ++i) {
        acc[0][i] += coef * (s[0][i] * d[0][i] + s[1][i] * d[1][i]);
        acc[1][i] += coef * (s[0][i] * d[2][i] + s[1][i] * d[3][i]);
      }
    }

    if (noise_.has_h()) {
      const bool with_g = options_.hg_coupling == HgCoupling::AllIndices || alpha.empty();
      const auto& d = phys.gradient[a];
      for (int k = 0; k < noise_.noise_modes(); ++k) {
        const auto& s = sigma_phys_[static_cast<std::size_t>(k)];
        VectorSamples transport(grid_);
        for (std::size_t i = 0; i < np; ++i) {
          transport.components[0][i] = s[0][i] * d[0][i] + s[1][i] * d[1][i];
          transport.components[1][i] = s[0][i] * d[2][i] + s[1][i] * d[3][i];
        }
        SpectralField lk = from_grid(transport);
        for (int l = 0; l < Grid::kDim; ++l) band_filter(grid_, lk.component(l));
        if (with_g) lk += noise_.g(k);
        const auto lphys = physical_of(potential_project(lk));
        for (int i = 0; i < Grid::kDim; ++i) {
          const auto& h = h_phys_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
          for (std::size_t x = 0; x < np; ++x) {
            acc[0][x] += lphys[static_cast<std::size_t>(i)][x] * h[0][x];
            acc[1][x] += lphys[static_cast<std::size_t>(i)][x] * h[1][x];
          }
        }
      }
    }
  }

  SpectralField out(grid_);
  for (int l = 0; l < Grid::kDim; ++l) {
    grid_.forward(acc[static_cast<std::size_t>(l)], out.component(l));
    band_filter(grid_, out.component(l));
  }

  if (!nonlinear_only) {
    const auto& b = options_.drift;
    if (b[0] != 0.0 || b[1] != 0.0) {
      const SpectralField& u = coeffs[a];
      for (int row = 0; row < grid_.n(); ++row) {
        const int kx = grid_.wave_index(row);
        for (int col = 0; col < grid_.half(); ++col) {
          const std::size_t i = grid_.index(row, col);
          const Complex sym = kI * (b[0] * grid_.odd_wavenumber(kx) + b[1] * grid_.odd_wavenumber(col));
          for (int l = 0; l < Grid::kDim; ++l) out.component(l)[i] += sym * u.component(l)[i];
        }
      }
    }
    if (alpha.empty() && has_forcing_) out += forcing_;
    if (alpha.order() == 1) {
      const auto& e = alpha.entries().front();
      const double m = time_basis_->value(e.slot.time_mode, t);
      out.axpy(m, noise_.g(e.slot.noise_mode - 1));
    }
  }

  leray_project_inplace(grid_, out.component(0), out.component(1));
  out.set_divergence_free(true);
  return out;
}

void DriftKernel::evaluate(std::span<const SpectralField> coeffs, double t, std::vector<SpectralField>& out,
                           int workers, double* speed_bound) const {
  if (coeffs.size() != set_.size())
    throw Error(ErrorCode::IndexSetMismatch, "state has " + std::to_string(coeffs.size()) + " coefficients, index set " +
                                                 std::to_string(set_.size()));
  const PhysicalStack phys = to_physical(coeffs, workers, speed_bound);
  out.assign(coeffs.size(), SpectralField(grid_));
  const auto n = static_cast<std::ptrdiff_t>(coeffs.size());
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic, 1)
  for (std::ptrdiff_t a = 0; a < n; ++a)
    out[static_cast<std::size_t>(a)] = assemble(phys, coeffs, static_cast<std::size_t>(a), t, false);
}

SpectralField DriftKernel::evaluate_one(std::span<const SpectralField> coeffs, std::size_t alpha, double t) const {
  const PhysicalStack phys = to_physical(coeffs, 1, nullptr);
  return assemble(phys, coeffs, alpha, t, false);
}

SpectralField DriftKernel::nonlinear_term(std::span<const SpectralField> coeffs, std::size_t alpha) const {
  const PhysicalStack phys = to_physical(coeffs, 1, nullptr);
  return assemble(phys, coeffs, alpha, 0.0, true);
}

DiffusionFactor::DiffusionFactor(const Grid& grid, const Matrix2& a, double dt)
    : grid_(grid), factor_(grid.spectral_size()) {
  for (int row = 0; row < grid.n(); ++row) {
    const int kx = grid.wave_index(row);
    for (int col = 0; col < grid.half(); ++col) {
      const double k0 = grid.wavenumber(kx), k1 = grid.wavenumber(col);
      const double cross = grid.odd_wavenumber(kx) * grid.odd_wavenumber(col);
      const double q = a(0, 0) * k0 * k0 + (a(0, 1) + a(1, 0)) * cross + a(1, 1) * k1 * k1;
      factor_[grid.index(row, col)] = std::exp(-q * dt);
    }
  }
}

void DiffusionFactor::apply(SpectralField& f) const {
  if (!(f.grid() == grid_)) throw Error(ErrorCode::ShapeMismatch, "field on a different grid");
  for (int l = 0; l < Grid::kDim; ++l) {
    auto c = f.component(l);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= factor_[i];
  }
}

SpectralField diffusion_term(const SpectralField& f, const Matrix2& a) {
  const Grid& g = f.grid();
  SpectralField out(g);
  for (int row = 0; row < g.n(); ++row) {
    const int kx = g.wave_index(row);
    for (int col = 0; col < g.half(); ++col) {
      const double k0 = g.wavenumber(kx), k1 = g.wavenumber(col);
      const double cross = g.odd_wavenumber(kx) * g.odd_wavenumber(col);
      const double q = a(0, 0) * k0 * k0 + (a(0, 1) + a(1, 0)) * cross + a(1, 1) * k1 * k1;
      const std::size_t i = g.index(row, col);
      for (int l = 0; l < Grid::kDim; ++l) out.component(l)[i] = -q * f.component(l)[i];
    }
  }
  out.set_divergence_free(f.divergence_free());
  return out;
}

void if_ssprk2_step(std::vector<SpectralField>& u, double t, double dt, const DiffusionFactor& decay,
                    const ExplicitRhs& rhs, int workers) {
  std::vector<SpectralField> n0;
  rhs(u, t, n0);
  std::vector<SpectralField> v = u;
  const auto n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(static)
  for (std::ptrdiff_t ai = 0; ai < n; ++ai) {
    const auto a = static_cast<std::size_t>(ai);
    v[a].axpy(dt, n0[a]);
    decay.apply(v[a]);
    leray_project_inplace(v[a].grid(), v[a].component(0), v[a].component(1));
    v[a].set_divergence_free(true);
  }
  std::vector<SpectralField> n1;
  rhs(v, t + dt, n1);
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(static)
  for (std::ptrdiff_t ai = 0; ai < n; ++ai) {
    const auto a = static_cast<std::size_t>(ai);
    SpectralField& ua = u[a];
    decay.apply(ua);
    v[a].axpy(dt, n1[a]);
    ua *= 0.5;
    ua.axpy(0.5, v[a]);
    leray_project_inplace(ua.grid(), ua.component(0), ua.component(1));
    ua.set_divergence_free(true);
  }
}

}  // namespace chaos_ns
