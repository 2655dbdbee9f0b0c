#pragma once

// Explicit (non-diffusive) right-hand side shared by the chaos propagator and
// the path solver, plus the integrating-factor SSP-RK2 step built on it.
//
// For every index alpha the kernel returns
//   S[ - sum_{(beta,gamma)} w (u_gamma . grad) u_beta + (b . grad) u_alpha + L~_i(u_alpha) h^i
//      + 1{alpha = 0}(f + d_j f^j)
//      + sum_{j,k} m_j(t) alpha_j^k ((sigma_k . grad) u_{alpha(j,k)} + 1{|alpha| = 1} g_k) ]
// with all products formed pseudo-spectrally under the 2/3 rule.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "chaos_ns/coupling.hpp"
#include "chaos_ns/noise_model.hpp"
#include "chaos_ns/spectral_field.hpp"
#include "chaos_ns/time_basis.hpp"

namespace chaos_ns {

/// Deterministic, time-independent forcing f and the divergence-form terms f^j.
struct Forcing {
  std::optional<SpectralField> f;
  std::array<std::optional<SpectralField>, Grid::kDim> f_div;
};

/// f + sum_j d_j f^j as one spectral field (zero when nothing is set).
SpectralField total_forcing(const Grid& grid, const Forcing& forcing);

/// Where g enters L~(u) = G[(sigma_k . grad) u + g_k] in the h coupling.
enum class HgCoupling {
  MeanOnly,    // g contributes only at alpha = 0
  AllIndices,  // g contributes for every alpha
};

struct DriftOptions {
  std::array<double, 2> drift{0.0, 0.0};   // constant b
  HgCoupling hg_coupling = HgCoupling::MeanOnly;
  int advect_cutoff = -1;                   // Psi cutoff on the advecting velocity; < 0 disables
  bool convection = true;
};

/// Each coefficient as dealiased physical velocity (2 arrays) and gradient
/// (4 arrays, order d_x u^0, d_y u^0, d_x u^1, d_y u^1).
struct PhysicalStack {
  std::vector<std::array<std::vector<double>, 2>> velocity;
  std::vector<std::array<std::vector<double>, 4>> gradient;
};

class DriftKernel {
 public:
  DriftKernel(const Grid& grid, const IndexSet& set, const CouplingTable& table, const NoiseModel& noise,
              std::optional<TimeBasis> time_basis, Forcing forcing, DriftOptions options);

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] const IndexSet& index_set() const noexcept { return set_; }
  [[nodiscard]] const DriftOptions& options() const noexcept { return options_; }

  /// out[alpha] = explicit part of the right-hand side at time t.
  /// `speed_bound` (optional) receives sum_alpha max|u_alpha| / sqrt(alpha!).
  void evaluate(std::span<const SpectralField> coeffs, double t, std::vector<SpectralField>& out, int workers,
                double* speed_bound = nullptr) const;

  /// Same, for one index only (used by tests to split terms).
  [[nodiscard]] SpectralField evaluate_one(std::span<const SpectralField> coeffs, std::size_t alpha, double t) const;

  /// S[sum of table products] alone for index alpha, with the minus sign.
  [[nodiscard]] SpectralField nonlinear_term(std::span<const SpectralField> coeffs, std::size_t alpha) const;

 private:
  struct Decrement {
    int time_mode;
    int noise_mode;
    double multiplicity;  // alpha_j^k
    std::size_t target;   // position of alpha(j,k)
  };
  struct WeightedPair {
    std::size_t beta;
    std::size_t gamma;
    double weight;
  };

  PhysicalStack to_physical(std::span<const SpectralField> coeffs, int workers, double* speed_bound) const;
  SpectralField assemble(const PhysicalStack& phys, std::span<const SpectralField> coeffs, std::size_t alpha, double t,
                         bool nonlinear_only) const;

  Grid grid_;
  IndexSet set_;
  std::vector<std::vector<WeightedPair>> table_;
  std::vector<std::vector<Decrement>> decrements_;
  std::vector<double> inv_sqrt_factorial_;
  NoiseModel noise_;
  std::optional<TimeBasis> time_basis_;
  SpectralField forcing_;
  bool has_forcing_ = false;
  DriftOptions options_;
  std::vector<std::array<std::vector<double>, 2>> sigma_phys_;
  // h_phys_[i][k] = physical h^{., i}_k
  std::array<std::vector<std::array<std::vector<double>, 2>>, Grid::kDim> h_phys_;
};

/// exp(-a^{ij} k_i k_j dt) applied mode by mode.
class DiffusionFactor {
 public:
  DiffusionFactor(const Grid& grid, const Matrix2& diffusion, double dt);
  void apply(SpectralField& f) const;
  [[nodiscard]] double factor(int row, int col) const { return factor_[grid_.index(row, col)]; }

 private:
  Grid grid_;
  std::vector<double> factor_;
};

/// Symbol -a^{ij} k_i k_j applied to f.
SpectralField diffusion_term(const SpectralField& f, const Matrix2& diffusion);

using ExplicitRhs = std::function<void(std::span<const SpectralField>, double, std::vector<SpectralField>&)>;

/// One integrating-factor SSP-RK2 step, Leray re-projection after each stage:
///   v = E(u + dt N(u, t)),  u' = E u / 2 + (v + dt N(v, t + dt)) / 2.
void if_ssprk2_step(std::vector<SpectralField>& u, double t, double dt, const DiffusionFactor& decay,
                    const ExplicitRhs& rhs, int workers);

}  // namespace chaos_ns
