#pragma once

// Truncated chaos propagator: one deterministic PDE per multi-index, coupled
// through the convection table and the noise decrements.

#include <optional>
#include <span>
#include <vector>

#include "chaos_ns/coupling.hpp"
#include "chaos_ns/drift_kernel.hpp"
#include "chaos_ns/hermite.hpp"
#include "chaos_ns/multi_index.hpp"
#include "chaos_ns/noise_model.hpp"
#include "chaos_ns/spectral_field.hpp"
#include "chaos_ns/time_basis.hpp"

namespace chaos_ns {

enum class CflPolicy { Error, Warn };

struct PropagatorConfig {
  double nu = 0.1;
  std::array<double, 2> drift{0.0, 0.0};
  Forcing forcing;
  HgCoupling hg_coupling = HgCoupling::MeanOnly;
  bool convection = true;
  double dt = 1e-3;
  double horizon = 1.0;  // T, also the time-basis interval
  CflPolicy cfl = CflPolicy::Error;
};

class PropagatorSystem {
 public:
  /// Builds the coupling table and time basis. Throws NotElliptic when nu <= 0.
  PropagatorSystem(IndexSet set, NoiseModel noise, PropagatorConfig config, int workers = 1);

  [[nodiscard]] const Grid& grid() const noexcept { return noise_.grid(); }
  [[nodiscard]] const IndexSet& index_set() const noexcept { return set_; }
  [[nodiscard]] const CouplingTable& coupling_table() const noexcept { return table_; }
  [[nodiscard]] const NoiseModel& noise() const noexcept { return noise_; }
  [[nodiscard]] const TimeBasis& time_basis() const noexcept { return basis_; }
  [[nodiscard]] const PropagatorConfig& config() const noexcept { return config_; }
  /// a = nu I + ito correction.
  [[nodiscard]] const Matrix2& diffusion() const noexcept { return diffusion_; }
  [[nodiscard]] const DriftKernel& kernel() const noexcept { return kernel_; }
  [[nodiscard]] const DiffusionFactor& decay() const noexcept { return decay_; }
  [[nodiscard]] double ellipticity() const noexcept { return delta_; }

 private:
  IndexSet set_;
  NoiseModel noise_;
  PropagatorConfig config_;
  CouplingTable table_;
  TimeBasis basis_;
  Matrix2 diffusion_;
  double delta_;
  DriftKernel kernel_;
  DiffusionFactor decay_;
};

struct ChaosState {
  std::vector<SpectralField> coeffs;  // one per index, in index-set order
  double t = 0.0;
};

/// u_hat_0 = S(u0), every other coefficient zero.
ChaosState initial_state(const SpectralField& u0, const PropagatorSystem& system);

/// Full right-hand side including diffusion.
std::vector<SpectralField> rhs(const PropagatorSystem& system, const ChaosState& state, double t, int workers = 1);

/// Advances by one dt. Returns the advective CFL number of the start state.
/// Throws CflViolation (policy Error) and NumericalFailure on non-finite energy.
double step(const PropagatorSystem& system, ChaosState& state, int workers = 1);

struct PropagatorSample {
  int step = 0;
  double t = 0.0;
  double chaos_energy = 0.0;  // sum |u_alpha|^2 / alpha!
  double mean_energy = 0.0;   // |u_0|^2
  double max_divergence = 0.0;
};

struct PropagatorRun {
  std::vector<PropagatorSample> samples;
  double max_cfl = 0.0;
  int cfl_warnings = 0;
};

/// Steps to t_end (a whole number of dt), sampling every `output_stride` steps
/// plus the final step.
PropagatorRun integrate(const PropagatorSystem& system, ChaosState& state, double t_end, int output_stride = 1,
                        int workers = 1);

const SpectralField& mean(const ChaosState& state);
double second_moment(const ChaosState& state, const IndexSet& set);
double max_coefficient_divergence(const ChaosState& state);

/// sum_alpha zeta_alpha(xi) / alpha! u_alpha.
SpectralField reconstruct(const ChaosState& state, const IndexSet& set, const ChaosCoordinates& xi);

struct PressureGradients {
  SpectralField grad_p;
  std::vector<SpectralField> grad_ptilde;  // one per noise mode
};

struct PressureContext {
  Matrix2 diffusion = Matrix2::Zero();
  std::array<double, 2> drift{0.0, 0.0};
  Forcing forcing;
};

/// grad p~_k = G[(sigma_k . grad) u + g_k],
/// grad p = G[-(u . grad) u + div(a grad u) + f + (b . grad) u + L~_i h^i + d_i f^i].
PressureGradients recover_pressure_gradients(const SpectralField& u, const NoiseModel& noise,
                                             const PressureContext& context);

}  // namespace chaos_ns
