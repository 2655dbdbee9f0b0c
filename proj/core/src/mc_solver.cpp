#include "chaos_ns/mc_solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "band.hpp"
#include "chaos_ns/errors.hpp"
#include "chaos_ns/rng.hpp"
#include "chaos_ns/spectral_ops.hpp"

namespace chaos_ns {

namespace {

constexpr std::size_t kChunk = 32;
constexpr int kMaxCayleyIterations = 80;

double energy_of(const SpectralField& u) {
  const double e = l2_norm(u);
  return e * e;
}

double dissipation_rate(const SpectralField& u) {
  const double h = h1_seminorm(u);
  return h * h;
}

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) return std::accumulate(x.begin(), x.end(), 0.0);
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

std::string stamp(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

}  // namespace

// (sigma . grad) products, by sparse convolution when every sigma_k has few
// Fourier modes and by dealiased grid products otherwise.
struct McSolver::TransportOps {
  static constexpr std::size_t kMaxSparseTerms = 64;

  bool sparse = true;
  std::vector<detail::SparseVectorField> sigma_sparse;
  std::vector<detail::PhysicalVector> sigma_phys;

  explicit TransportOps(const NoiseModel& noise) {
    for (const auto& s : noise.sigma_fields()) {
      detail::SparseVectorField sv;
      if (!detail::sparse_of(s, kMaxSparseTerms, sv)) sparse = false;
      sigma_sparse.push_back(std::move(sv));
    }
    if (!sparse) {
      sigma_sparse.clear();
      for (const auto& s : noise.sigma_fields()) sigma_phys.push_back(detail::physical_of(s));
    }
  }

  static SpectralField grid_product(const detail::PhysicalVector& v, const SpectralField& w) {
    const Grid& g = w.grid();
    detail::PhysicalGradient grad;
    std::vector<Complex> scratch;
    detail::physical_gradient(w, grad, scratch);
    detail::PhysicalVector acc{detail::Plane(g.physical_size(), 0.0), detail::Plane(g.physical_size(), 0.0)};
    detail::accumulate_advection(v, grad, 1.0, acc);
    return detail::project_physical(g, acc);
  }

  [[nodiscard]] SpectralField apply(int k, const SpectralField& w) const {
    const auto kk = static_cast<std::size_t>(k);
    return sparse ? detail::sparse_transport(sigma_sparse[kk], w) : grid_product(sigma_phys[kk], w);
  }

  /// -1/2 sum_k B_k B_k w.
  [[nodiscard]] SpectralField compensation(const SpectralField& w) const {
    const Grid& g = w.grid();
    const int count = static_cast<int>(sparse ? sigma_sparse.size() : sigma_phys.size());
    if (sparse) {
      SpectralField out(g);
      for (int k = 0; k < count; ++k) out.axpy(-0.5, apply(k, apply(k, w)));
      out.set_divergence_free(true);
      return out;
    }
    detail::PhysicalVector acc{detail::Plane(g.physical_size(), 0.0), detail::Plane(g.physical_size(), 0.0)};
    detail::PhysicalGradient grad;
    std::vector<Complex> scratch;
    for (int k = 0; k < count; ++k) {
      const SpectralField b = apply(k, w);
      detail::physical_gradient(b, grad, scratch);
      detail::accumulate_advection(sigma_phys[static_cast<std::size_t>(k)], grad, -0.5, acc);
    }
    return detail::project_physical(g, acc);
  }

  /// Returns A = sum_k dw_k B_k as a callable.
  [[nodiscard]] std::function<SpectralField(const SpectralField&)> noise_operator(std::span<const double> dw,
                                                                                 const Grid& g) const {
    if (sparse) {
      auto s = std::make_shared<detail::SparseVectorField>(detail::combine(sigma_sparse, dw));
      return [s](const SpectralField& w) { return detail::sparse_transport(*s, w); };
    }
    auto s = std::make_shared<detail::PhysicalVector>(
        detail::PhysicalVector{detail::Plane(g.physical_size(), 0.0), detail::Plane(g.physical_size(), 0.0)});
    for (std::size_t k = 0; k < sigma_phys.size(); ++k)
      for (std::size_t l = 0; l < 2; ++l)
        for (std::size_t i = 0; i < g.physical_size(); ++i) (*s)[l][i] += dw[k] * sigma_phys[k][l][i];
    return [s](const SpectralField& w) { return grid_product(*s, w); };
  }
};

double clip_weight(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const auto bump = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  const double a = bump(2.0 - r);
  return a / (a + bump(r - 1.0));
}

McSolver::McSolver(McConfig config)
    : config_(std::move(config)),
      set_(enumerate_indices(0, 1, config_.noise.noise_modes())),
      table_(build_coupling_table(set_)),
      kernel_(config_.noise.grid(), set_, table_, config_.noise, TimeBasis(config_.horizon, 1), config_.forcing,
              DriftOptions{config_.drift, config_.hg_coupling, config_.mollifier_cutoff, config_.convection}),
      diffusion_(config_.nu * Matrix2::Identity() + config_.noise.ito_correction()),
      decay_(config_.noise.grid(), diffusion_, config_.dt) {
  check_ellipticity(config_.nu, config_.noise.ito_correction());
  if (!(config_.dt > 0.0) || !(config_.horizon > 0.0))
    throw Error(ErrorCode::InvalidArgument, "dt and T must be positive");
  if (config_.paths < 1) throw Error(ErrorCode::InvalidArgument, "ensemble size must be >= 1");
  if (config_.output_stride < 1) throw Error(ErrorCode::InvalidArgument, "output stride must be >= 1");
  const double n = config_.horizon / config_.dt;
  steps_ = static_cast<int>(std::llround(n));
  if (steps_ < 1 || std::abs(steps_ - n) > 1e-9 * n)
    throw Error(ErrorCode::InvalidArgument, "T must be a whole number of steps dt");
  if (!config_.g_of_u.empty() && static_cast<int>(config_.g_of_u.size()) != config_.noise.noise_modes())
    throw Error(ErrorCode::InvalidArgument, "u-dependent g needs one callable per noise mode");
  if (config_.clip_scale && !(*config_.clip_scale > 0.0))
    throw Error(ErrorCode::InvalidArgument, "clip scale must be positive");

  if (config_.noise.has_transport()) transport_ = std::make_shared<const TransportOps>(config_.noise);
  for (int k = 0; k < config_.noise.noise_modes(); ++k) g_projected_.push_back(leray_project(config_.noise.g(k)));
}

SpectralField McSolver::transport(int k, const SpectralField& w) const {
  if (k < 0 || k >= config_.noise.noise_modes()) throw Error(ErrorCode::InvalidArgument, "noise mode out of range");
  if (!transport_) return SpectralField(grid());
  return transport_->apply(k, w);
}

SpectralField McSolver::pointwise(const PointwiseForcing& fn, const SpectralField& u, double t) const {
  const Grid& g = grid();
  const VectorSamples us = to_grid(u);
  VectorSamples out(g);
  for (int ix = 0; ix < g.n(); ++ix) {
    for (int iy = 0; iy < g.n(); ++iy) {
      const std::size_t p = static_cast<std::size_t>(ix) * static_cast<std::size_t>(g.n()) + static_cast<std::size_t>(iy);
      const std::array<double, 2> uv{us.components[0][p], us.components[1][p]};
      auto v = fn(t, {g.coordinate(ix), g.coordinate(iy)}, uv);
      if (config_.clip_scale) {
        const double w = clip_weight(std::hypot(uv[0], uv[1]) / *config_.clip_scale);
        v[0] *= w;
        v[1] *= w;
      }
      out.components[0][p] = v[0];
      out.components[1][p] = v[1];
    }
  }
  return leray_project(dealias(from_grid(out)));
}

void McSolver::drift(std::span<const SpectralField> u, double t, std::vector<SpectralField>& out, double* speed) const {
  kernel_.evaluate(u, t, out, 1, speed);
  if (config_.f_of_u) out[0] += pointwise(*config_.f_of_u, u[0], t);
  if (transport_) out[0] += transport_->compensation(u[0]);
  out[0].set_divergence_free(true);
}

double McSolver::step_path(SpectralField& u, double t, std::span<const double> dw, int* cayley_iterations) const {
  const NoiseModel& noise = config_.noise;
  if (static_cast<int>(dw.size()) != noise.noise_modes())
    throw Error(ErrorCode::ShapeMismatch, "increment vector has " + std::to_string(dw.size()) + " entries, expected " +
                                              std::to_string(noise.noise_modes()));
  const Grid& g = grid();
  const double dt = config_.dt;

  std::vector<SpectralField> additive;
  if (!config_.g_of_u.empty()) {
    for (const auto& fn : config_.g_of_u) additive.push_back(pointwise(fn, u, t));
  }

  double speed = 0.0;
  bool first = true;
  const ExplicitRhs rhs = [&](std::span<const SpectralField> v, double s, std::vector<SpectralField>& out) {
    drift(v, s, out, first ? &speed : nullptr);
    first = false;
  };
  std::vector<SpectralField> state{u};
  if_ssprk2_step(state, t, dt, decay_, rhs, 1);
  u = std::move(state.front());

  int iterations = 0;
  if (transport_) {
    const auto a = transport_->noise_operator(dw, g);
    const double scale = l2_norm(u);
    SpectralField v = u;
    double previous = INFINITY;
    for (;;) {
      ++iterations;
      SpectralField next = a(u + v);
      next *= 0.5;
      next += u;
      const double change = l2_norm(next - v);
      v = std::move(next);
      if (change <= 1e-15 * scale) break;
      if (change >= previous && change <= 1e-12 * scale) break;
      if (iterations >= kMaxCayleyIterations)
        throw Error(ErrorCode::NumericalFailure, "transport step did not converge at t = " + stamp(t));
      previous = change;
    }
    u = std::move(v);
  }

  if (noise.has_additive() || !additive.empty()) {
    for (int k = 0; k < noise.noise_modes(); ++k) {
      const auto kk = static_cast<std::size_t>(k);
      if (dw[kk] == 0.0) continue;
      u.axpy(dw[kk], additive.empty() ? g_projected_[kk] : additive[kk]);
    }
  }
  u.set_divergence_free(true);
  if (cayley_iterations != nullptr) *cayley_iterations = iterations;
  return speed * dt * g.n() / g.length();
}

template <class Increments>
Trajectory McSolver::run_path(const SpectralField& u0, Increments&& next) const {
  if (!(u0.grid() == grid())) throw Error(ErrorCode::ShapeMismatch, "initial field on a different grid");
  const double dt = config_.dt;
  Trajectory tr;
  SpectralField u = leray_project(u0);
  double e0 = energy_of(u);
  double d0 = dissipation_rate(u);
  double integral = 0.0;
  tr.samples.push_back({0, 0.0, e0, 0.0});
  tr.fields.push_back(u);
  tr.max_divergence = max_divergence(u);

  for (int s = 1; s <= steps_; ++s) {
    const double t = static_cast<double>(s - 1) * dt;
    const std::vector<double> dw = next(t);
    int iterations = 0;
    const double cfl = step_path(u, t, dw, &iterations);
    tr.max_cayley_iterations = std::max(tr.max_cayley_iterations, iterations);
    tr.max_cfl = std::max(tr.max_cfl, cfl);
    const double t1 = static_cast<double>(s) * dt;
    if (cfl > 1.0) {
      if (config_.cfl == CflPolicy::Error)
        throw Error(ErrorCode::CflViolation, "advective CFL " + stamp(cfl) + " at t = " + stamp(t1));
      ++tr.cfl_warnings;
    }
    const double e1 = energy_of(u);
    const double d1 = dissipation_rate(u);
    if (!std::isfinite(e1) || !std::isfinite(d1))
      throw Error(ErrorCode::NumericalFailure, "non-finite energy at t = " + stamp(t1));
    integral += 0.5 * dt * (d0 + d1);
    if (e0 > 0.0) tr.max_energy_increase = std::max(tr.max_energy_increase, (e1 - e0) / e0);
    tr.max_divergence = std::max(tr.max_divergence, max_divergence(u));
    e0 = e1;
    d0 = d1;
    if (s % config_.output_stride == 0 || s == steps_) {
      tr.samples.push_back({s, t1, e1, integral});
      tr.fields.push_back(u);
    }
  }
  return tr;
}

Trajectory McSolver::simulate_path(const SpectralField& u0, std::uint64_t path_index) const {
  CounterRng rng(config_.seed, path_index);
  const int nw = config_.noise.noise_modes();
  return run_path(u0, [&](double) { return wiener_increments(config_.dt, nw, rng); });
}

Trajectory McSolver::simulate_driven(const SpectralField& u0,
                                     const std::function<std::vector<double>(double)>& path) const {
  const double dt = config_.dt;
  const int nw = config_.noise.noise_modes();
  std::vector<double> w0 = path(0.0);
  if (static_cast<int>(w0.size()) != nw) throw Error(ErrorCode::ShapeMismatch, "driving path has the wrong width");
  for (double x : w0)
    if (x != 0.0) throw Error(ErrorCode::InvalidArgument, "driving path must start at zero");
  int s = 0;
  return run_path(u0, [&](double) {
    ++s;
    std::vector<double> w1 = path(static_cast<double>(s) * dt);
    std::vector<double> dw(w1.size());
    for (std::size_t k = 0; k < dw.size(); ++k) dw[k] = w1[k] - w0[k];
    w0 = std::move(w1);
    return dw;
  });
}

EnsembleStats McSolver::run_ensemble(const SpectralField& u0, int workers) const {
  const auto m = static_cast<std::size_t>(config_.paths);
  EnsembleStats stats;
  stats.paths = config_.paths;
  stats.zero_variance = m == 1;

  std::vector<std::vector<double>> energy;       // [sample][path]
  std::vector<std::vector<double>> dissipation;  // [sample][path]
  std::vector<TrajectorySample> layout;
  std::vector<std::vector<double>> batch_variance;  // [batch][sample]

  for (std::size_t start = 0; start < m; start += kChunk) {
    const std::size_t len = std::min(kChunk, m - start);
    std::vector<Trajectory> chunk(len);
    std::vector<std::exception_ptr> failures(len);
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic, 1)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(len); ++j) {
      try {
        chunk[static_cast<std::size_t>(j)] = simulate_path(u0, start + static_cast<std::size_t>(j));
      } catch (...) {
        failures[static_cast<std::size_t>(j)] = std::current_exception();
      }
    }
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);

    std::vector<SpectralField> chunk_sum;
    for (std::size_t j = 0; j < len; ++j) {
      Trajectory& tr = chunk[j];
      if (layout.empty()) {
        layout = tr.samples;
        energy.assign(layout.size(), std::vector<double>(m));
        dissipation.assign(layout.size(), std::vector<double>(m));
      }
      if (j == 0) {
        chunk_sum = tr.fields;
      } else {
        for (std::size_t s = 0; s < layout.size(); ++s) chunk_sum[s] += tr.fields[s];
      }
      for (std::size_t s = 0; s < layout.size(); ++s) {
        energy[s][start + j] = tr.samples[s].energy;
        dissipation[s][start + j] = tr.samples[s].dissipation;
      }
      stats.max_energy_increase = std::max(stats.max_energy_increase, tr.max_energy_increase);
      stats.max_divergence = std::max(stats.max_divergence, tr.max_divergence);
      stats.max_cfl = std::max(stats.max_cfl, tr.max_cfl);
      stats.cfl_warnings += tr.cfl_warnings;
    }
    // Batch variance estimate of this chunk, for the batch-means standard error.
    // Deviation form, and exactly 0 when every path agrees.
    if (len > 1) {
      const double n = static_cast<double>(len);
      std::vector<double> v(layout.size());
      for (std::size_t s = 0; s < layout.size(); ++s) {
        bool identical = true;
        for (std::size_t j = 1; j < len && identical; ++j) identical = chunk[j].fields[s] == chunk[0].fields[s];
        if (identical) continue;
        SpectralField mean = chunk_sum[s];
        mean *= 1.0 / n;
        std::vector<double> dev(len);
        for (std::size_t j = 0; j < len; ++j) {
          const double d = l2_norm(chunk[j].fields[s] - mean);
          dev[j] = d * d;
        }
        v[s] = pairwise_sum(dev) / (n - 1.0);
      }
      batch_variance.push_back(std::move(v));
    }
    if (stats.mean_fields.empty()) {
      stats.mean_fields = std::move(chunk_sum);
    } else {
      for (std::size_t s = 0; s < layout.size(); ++s) stats.mean_fields[s] += chunk_sum[s];
    }
  }

  const double inv_m = 1.0 / static_cast<double>(m);
  for (auto& f : stats.mean_fields) {
    f *= inv_m;
    f.set_divergence_free(true);
  }
  for (std::size_t s = 0; s < layout.size(); ++s) {
    EnsembleSample out;
    out.step = layout[s].step;
    out.t = layout[s].t;
    out.mean_energy = pairwise_sum(energy[s]) * inv_m;
    out.mean_dissipation = pairwise_sum(dissipation[s]) * inv_m;
    const auto [lo, hi] = std::minmax_element(energy[s].begin(), energy[s].end());
    if (m > 1 && *lo != *hi) {
      std::vector<double> sq(m);
      for (std::size_t p = 0; p < m; ++p) sq[p] = (energy[s][p] - out.mean_energy) * (energy[s][p] - out.mean_energy);
      out.energy_se = std::sqrt(pairwise_sum(sq) / static_cast<double>(m - 1) * inv_m);
    }
    const std::size_t batches = batch_variance.size();
    if (batches > 1) {
      std::vector<double> v(batches);
      for (std::size_t b = 0; b < batches; ++b) v[b] = batch_variance[b][s];
      const double mean_v = pairwise_sum(v) / static_cast<double>(batches);
      for (double& x : v) x = (x - mean_v) * (x - mean_v);
      out.variance_se = std::sqrt(pairwise_sum(v) / static_cast<double>(batches - 1) / static_cast<double>(batches));
    }
    stats.samples.push_back(out);
  }
  return stats;
}

}  // namespace chaos_ns
