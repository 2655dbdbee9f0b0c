#include "chaos_ns/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chaos_ns/errors.hpp"
#include "chaos_ns/spectral_ops.hpp"

namespace chaos_ns {

namespace {

DriftOptions drift_options(const PropagatorConfig& c) {
  DriftOptions o;
  o.drift = c.drift;
  o.hg_coupling = c.hg_coupling;
  o.convection = c.convection;
  return o;
}

Matrix2 effective_diffusion(double nu, const Matrix2& ito) { return nu * Matrix2::Identity() + ito; }

std::string time_stamp(double t) {
  std::ostringstream s;
  s.precision(17);
  s << t;
  return s.str();
}

}  // namespace

PropagatorSystem::PropagatorSystem(IndexSet set, NoiseModel noise, PropagatorConfig config, int workers)
    : set_(std::move(set)),
      noise_(std::move(noise)),
      config_(std::move(config)),
      table_(build_coupling_table(set_, workers)),
      basis_(config_.horizon, set_.truncation().time_modes),
      diffusion_(effective_diffusion(config_.nu, noise_.ito_correction())),
      delta_(check_ellipticity(config_.nu, noise_.ito_correction())),
      kernel_(noise_.grid(), set_, table_, noise_, basis_, config_.forcing, drift_options(config_)),
      decay_(noise_.grid(), diffusion_, config_.dt) {
  if (!(config_.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
}

ChaosState initial_state(const SpectralField& u0, const PropagatorSystem& system) {
  if (!(u0.grid() == system.grid())) throw Error(ErrorCode::ShapeMismatch, "initial field on a different grid");
  ChaosState state;
  state.coeffs.assign(system.index_set().size(), SpectralField(system.grid()));
  state.coeffs.front() = leray_project(u0);
  return state;
}

std::vector<SpectralField> rhs(const PropagatorSystem& system, const ChaosState& state, double t, int workers) {
  std::vector<SpectralField> out;
  system.kernel().evaluate(state.coeffs, t, out, workers);
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] += diffusion_term(state.coeffs[a], system.diffusion());
    out[a].set_divergence_free(true);
  }
  return out;
}

double step(const PropagatorSystem& system, ChaosState& state, int workers) {
  if (state.coeffs.size() != system.index_set().size())
    throw Error(ErrorCode::IndexSetMismatch, "state does not match the system index set");
  const Grid& g = system.grid();
  const double dt = system.config().dt;
  double speed = 0.0;
  bool first = true;
  const ExplicitRhs explicit_rhs = [&](std::span<const SpectralField> u, double t, std::vector<SpectralField>& out) {
    system.kernel().evaluate(u, t, out, workers, first ? &speed : nullptr);
    first = false;
  };
  if_ssprk2_step(state.coeffs, state.t, dt, system.decay(), explicit_rhs, workers);
  const double cfl = speed * dt * g.n() / g.length();
  return cfl;
}

PropagatorRun integrate(const PropagatorSystem& system, ChaosState& state, double t_end, int output_stride,
                        int workers) {
  const double dt = system.config().dt;
  const double t0 = state.t;
  const double span = t_end - t0;
  const auto steps = static_cast<long>(std::llround(span / dt));
  if (steps < 0 || std::abs(static_cast<double>(steps) * dt - span) > 1e-9 * std::max(1.0, std::abs(t_end)))
    throw Error(ErrorCode::InvalidArgument, "integration span is not a whole number of steps");
  if (output_stride < 1) throw Error(ErrorCode::InvalidArgument, "output stride must be >= 1");

  PropagatorRun run;
  const auto sample = [&](int s) {
    PropagatorSample p;
    p.step = s;
    p.t = state.t;
    p.chaos_energy = second_moment(state, system.index_set());
    const double m = l2_norm(state.coeffs.front());
    p.mean_energy = m * m;
    p.max_divergence = max_coefficient_divergence(state);
    if (!std::isfinite(p.chaos_energy))
      throw Error(ErrorCode::NumericalFailure, "non-finite chaos energy at t = " + time_stamp(state.t));
    run.samples.push_back(p);
  };

  sample(0);
  for (long s = 1; s <= steps; ++s) {
    const double cfl = step(system, state, workers);
    run.max_cfl = std::max(run.max_cfl, cfl);
    if (cfl > 1.0) {
      if (system.config().cfl == CflPolicy::Error)
        throw Error(ErrorCode::CflViolation, "advective CFL " + time_stamp(cfl) + " at t = " + time_stamp(state.t));
      ++run.cfl_warnings;
    }
    state.t = t0 + static_cast<double>(s) * dt;
    if (s % output_stride == 0 || s == steps) {
      sample(static_cast<int>(s));
    } else {
      const double e = l2_norm(state.coeffs.front());
      if (!std::isfinite(e))
        throw Error(ErrorCode::NumericalFailure, "non-finite mean field at t = " + time_stamp(state.t));
    }
  }
  return run;
}

const SpectralField& mean(const ChaosState& state) { return state.coeffs.front(); }

double second_moment(const ChaosState& state, const IndexSet& set) {
  if (state.coeffs.size() != set.size()) throw Error(ErrorCode::IndexSetMismatch, "state does not match index set");
  double total = 0.0;
  for (std::size_t a = 0; a < set.size(); ++a) {
    const double n = l2_norm(state.coeffs[a]);
    total += n * n / static_cast<double>(set[a].factorial());
  }
  return total;
}

double max_coefficient_divergence(const ChaosState& state) {
  double m = 0.0;
  for (const auto& c : state.coeffs) m = std::max(m, max_divergence(c));
  return m;
}

SpectralField reconstruct(const ChaosState& state, const IndexSet& set, const ChaosCoordinates& xi) {
  if (state.coeffs.size() != set.size()) throw Error(ErrorCode::IndexSetMismatch, "state does not match index set");
  SpectralField out(state.coeffs.front().grid());
  for (std::size_t a = 0; a < set.size(); ++a) {
    const double w = wick_eval(set[a], xi) / static_cast<double>(set[a].factorial());
    if (w != 0.0) out.axpy(w, state.coeffs[a]);
  }
  out.set_divergence_free(true);
  return out;
}

PressureGradients recover_pressure_gradients(const SpectralField& u, const NoiseModel& noise,
                                             const PressureContext& context) {
  const Grid& g = u.grid();
  PressureGradients out{SpectralField(g), {}};
  SpectralField total = advection(u, u);
  total *= -1.0;
  total += diffusion_term(u, context.diffusion);
  total += total_forcing(g, context.forcing);
  for (int j = 0; j < Grid::kDim; ++j)
    if (context.drift[static_cast<std::size_t>(j)] != 0.0)
      total.axpy(context.drift[static_cast<std::size_t>(j)], partial(u, j));

  for (int k = 0; k < noise.noise_modes(); ++k) {
    SpectralField l = noise.has_transport() ? advection(noise.sigma(k), u) : SpectralField(g);
    l += noise.g(k);
    SpectralField lt = potential_project(l);
    if (noise.has_h()) {
      const VectorSamples lp = to_grid(lt);
      VectorSamples acc(g);
      for (int i = 0; i < Grid::kDim; ++i) {
        const VectorSamples h = to_grid(noise.h(i, k));
        const auto& li = lp.components[static_cast<std::size_t>(i)];
        for (std::size_t x = 0; x < g.physical_size(); ++x) {
          acc.components[0][x] += li[x] * h.components[0][x];
          acc.components[1][x] += li[x] * h.components[1][x];
        }
      }
      total += dealias(from_grid(acc));
    }
    out.grad_ptilde.push_back(std::move(lt));
  }
  out.grad_p = potential_project(total);
  return out;
}

}  // namespace chaos_ns
