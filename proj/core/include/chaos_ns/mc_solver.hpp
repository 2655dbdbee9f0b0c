#pragma once

// Monte Carlo path solver for the Ito equation with transport and additive
// noise, ensemble statistics, and a mode driven by a prescribed Wiener path.
//
// One step of size dt from u_n:
//   1. drift: integrating-factor SSP-RK2 with a = nu I + ito, explicit part
//      S[-(Psi u . grad) u + (b . grad) u + L~ h + f + d_i f^i] - 1/2 sum_k B_k^2 u
//      where B_k w = S[(sigma_k . grad) w] (dealiased);
//   2. transport noise: Cayley map v = u + 1/2 A (u + v), A = sum_k dW^k B_k,
//      solved by fixed-point iteration (energy preserving because A is skew);
//   3. additive noise: u += sum_k S[g_k(u_n)] dW^k.
// The Cayley map realizes the Stratonovich increment; the -1/2 sum B_k^2 term
// returns it to the Ito drift. Steps 2, 3 and the compensation are skipped
// when the corresponding noise is absent, so the zero-noise step is exactly
// the single-index propagator step.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "chaos_ns/drift_kernel.hpp"
#include "chaos_ns/noise_model.hpp"
#include "chaos_ns/propagator.hpp"
#include "chaos_ns/spectral_field.hpp"

namespace chaos_ns {

/// Pointwise forcing value at (t, x, u(t, x)).
using PointwiseForcing = std::function<std::array<double, 2>(double t, std::array<double, 2> x, std::array<double, 2> u)>;

struct McConfig {
  explicit McConfig(NoiseModel model) : noise(std::move(model)) {}

  NoiseModel noise;
  double nu = 0.1;
  std::array<double, 2> drift{0.0, 0.0};
  Forcing forcing;
  HgCoupling hg_coupling = HgCoupling::MeanOnly;
  bool convection = true;
  int mollifier_cutoff = -1;  // Psi cutoff (|k|_inf); < 0 keeps the full dealiased band

  std::optional<PointwiseForcing> f_of_u;  // added to the drift
  std::vector<PointwiseForcing> g_of_u;    // replaces g_k when non-empty (one per noise mode)
  std::optional<double> clip_scale;        // multiplies f(u), g(u) by zeta(|u| / scale)

  double dt = 1e-3;
  double horizon = 1.0;
  int output_stride = 1;
  int paths = 1;
  std::uint64_t seed = 0;
  CflPolicy cfl = CflPolicy::Error;
};

/// Smooth cutoff: 1 on [0, 1], 0 on [2, inf).
double clip_weight(double r);

struct TrajectorySample {
  int step = 0;
  double t = 0.0;
  double energy = 0.0;       // |u|_2^2
  double dissipation = 0.0;  // int_0^t |grad u|_2^2 ds (trapezoid over steps)
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<SpectralField> fields;  // at the sample times
  double max_energy_increase = 0.0;   // max_n (|u_{n+1}|^2 - |u_n|^2) / |u_n|^2
  double max_divergence = 0.0;
  double max_cfl = 0.0;
  int cfl_warnings = 0;
  int max_cayley_iterations = 0;
};

struct EnsembleSample {
  int step = 0;
  double t = 0.0;
  double mean_energy = 0.0;
  double energy_se = 0.0;  // from the unbiased sample variance; 0 when M = 1
  /// Standard error of the field variance estimate M/(M-1) (E|u|^2 - |mean|^2),
  /// by batch means over the fixed path chunks; 0 with fewer than two chunks.
  double variance_se = 0.0;
  double mean_dissipation = 0.0;
};

struct EnsembleStats {
  std::vector<EnsembleSample> samples;
  std::vector<SpectralField> mean_fields;  // at the sample times
  int paths = 0;
  bool zero_variance = false;  // M = 1: standard errors are not estimable
  double max_energy_increase = 0.0;
  double max_divergence = 0.0;
  double max_cfl = 0.0;
  int cfl_warnings = 0;
};

class McSolver {
 public:
  /// Throws NotElliptic for nu <= 0 and InvalidArgument for bad dt, T, M or stride.
  explicit McSolver(McConfig config);

  [[nodiscard]] const McConfig& config() const noexcept { return config_; }
  [[nodiscard]] const Grid& grid() const noexcept { return config_.noise.grid(); }
  [[nodiscard]] const Matrix2& diffusion() const noexcept { return diffusion_; }
  [[nodiscard]] int steps() const noexcept { return steps_; }

  /// One step from (u, t) with the given increments. Returns the advective CFL
  /// number; `cayley_iterations` (optional) receives the fixed-point count.
  double step_path(SpectralField& u, double t, std::span<const double> dw, int* cayley_iterations = nullptr) const;

  /// Path driven by the counter stream (seed, path_index).
  [[nodiscard]] Trajectory simulate_path(const SpectralField& u0, std::uint64_t path_index) const;

  /// Same scheme, increments W(t_{n+1}) - W(t_n) from a supplied path.
  [[nodiscard]] Trajectory simulate_driven(const SpectralField& u0,
                                           const std::function<std::vector<double>(double)>& path) const;

  /// M paths, reduced in path order in fixed-size chunks: results do not depend on `workers`.
  [[nodiscard]] EnsembleStats run_ensemble(const SpectralField& u0, int workers = 1) const;

  /// Explicit drift for one state (kernel, pointwise forcing and Ito compensation).
  void drift(std::span<const SpectralField> u, double t, std::vector<SpectralField>& out, double* speed) const;

  /// B_k w = S[(sigma_k . grad) w].
  [[nodiscard]] SpectralField transport(int k, const SpectralField& w) const;

 private:
  template <class Increments>
  Trajectory run_path(const SpectralField& u0, Increments&& next) const;

  SpectralField pointwise(const PointwiseForcing& fn, const SpectralField& u, double t) const;

  struct TransportOps;

  McConfig config_;
  IndexSet set_;
  CouplingTable table_;
  DriftKernel kernel_;
  Matrix2 diffusion_;
  DiffusionFactor decay_;
  int steps_ = 0;
  std::shared_ptr<const TransportOps> transport_;
  std::vector<SpectralField> g_projected_;
};

}  // namespace chaos_ns
