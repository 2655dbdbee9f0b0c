#pragma once

// Truncated noise space: Kraichnan transport fields sigma_k, additive
// forcing components g_k, the h coupling fields, the Ito correction tensor,
// Wiener increments and Wiener paths rebuilt from chaos coordinates.

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "chaos_ns/hermite.hpp"
#include "chaos_ns/rng.hpp"
#include "chaos_ns/spectral_field.hpp"
#include "chaos_ns/time_basis.hpp"

namespace chaos_ns {

using Matrix2 = Eigen::Matrix2d;

/// C0 / ((d-1)(1+|z|^2)^((d+kappa)/2)) (I - z z^T / |z|^2) for d = 2.
Matrix2 spectrum_tensor(std::array<double, 2> z, double c0, double kappa);

enum class Phase { Cosine, Sine };

/// Adds a * cos(m.x) or a * sin(m.x) (a a constant vector) to f.
void add_plane_wave(SpectralField& f, std::array<int, 2> wave, std::array<double, 2> amplitude, Phase phase);

struct KraichnanMode {
  std::array<int, 2> wave{};
  Phase phase = Phase::Cosine;
  double amplitude = 0.0;  // sup-norm of the emitted field
};

struct KraichnanParams {
  double c0 = 1.0;
  double kappa = 1.0;
  int cutoff = 1;  // K_noise, in lattice units (|m|_inf)
};

struct KraichnanBasis {
  std::vector<SpectralField> sigma;
  std::vector<KraichnanMode> modes;
  Matrix2 ito_correction = Matrix2::Zero();
  /// Lattice normalization eta = 1/L^2 (Riemann sum of the inverse transform).
  double eta = 0.0;
};

/// Two real solenoidal fields (cosine, sine phase) per +-m representative with
/// 0 < |m|_inf <= cutoff, direction m_perp/|m|, amplitude sqrt(2 eta tr C_hat(m)),
/// so that sum_k sigma_k(x) (x) sigma_k(x) = eta sum_m C_hat(m) for every x.
/// Throws CutoffOutOfRange unless 1 <= cutoff <= floor(n/3).
KraichnanBasis build_kraichnan_basis(const Grid& grid, const KraichnanParams& params);

/// Number of +-m representatives with 0 < |m|_inf <= cutoff.
int kraichnan_representatives(int cutoff);

/// 1/2 times the grid average of sum_k sigma_k (x) sigma_k.
Matrix2 ito_correction_from_fields(const std::vector<SpectralField>& sigma);
/// Largest deviation of the pointwise sum_k sigma_k (x) sigma_k from its grid mean.
double ito_inhomogeneity(const std::vector<SpectralField>& sigma);

class NoiseModel {
 public:
  /// n_w silent modes: sigma = g = 0, h = 0.
  NoiseModel(const Grid& grid, int noise_modes);

  static NoiseModel kraichnan(const Grid& grid, const KraichnanParams& params);

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] int noise_modes() const noexcept { return static_cast<int>(sigma_.size()); }

  [[nodiscard]] const SpectralField& sigma(int k) const { return sigma_.at(static_cast<std::size_t>(k)); }
  [[nodiscard]] const SpectralField& g(int k) const { return g_.at(static_cast<std::size_t>(k)); }
  /// h^{., i} Y-component k (a vector field); zero unless set.
  [[nodiscard]] const SpectralField& h(int i, int k) const {
    return h_.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k));
  }
  [[nodiscard]] const std::vector<SpectralField>& sigma_fields() const noexcept { return sigma_; }

  void set_sigma(int k, SpectralField field);
  void set_g(int k, SpectralField field);
  void set_h(int i, int k, SpectralField field);

  [[nodiscard]] bool has_transport() const noexcept { return has_transport_; }
  [[nodiscard]] bool has_additive() const noexcept { return has_additive_; }
  [[nodiscard]] bool has_h() const noexcept { return has_h_; }

  [[nodiscard]] const Matrix2& ito_correction() const noexcept { return ito_correction_; }
  [[nodiscard]] const std::optional<KraichnanParams>& spectrum() const noexcept { return spectrum_; }
  [[nodiscard]] const std::vector<KraichnanMode>& modes() const noexcept { return modes_; }

 private:
  void refresh_flags();

  Grid grid_;
  std::vector<SpectralField> sigma_;
  std::vector<SpectralField> g_;
  std::array<std::vector<SpectralField>, Grid::kDim> h_;
  Matrix2 ito_correction_ = Matrix2::Zero();
  std::optional<KraichnanParams> spectrum_;
  std::vector<KraichnanMode> modes_;
  bool has_transport_ = false;
  bool has_additive_ = false;
  bool has_h_ = false;
};

/// delta = smallest eigenvalue of (a - ito) with a = nu I + ito; throws
/// NotElliptic when delta <= 0.
double check_ellipticity(double nu, const Matrix2& ito_correction);

/// n_w independent N(0, dt) draws.
std::vector<double> wiener_increments(double dt, int noise_modes, CounterRng& rng);

/// W^k(t) = sum_{i <= n_t} xi_i^k M_i(t), k = 1..n_w.
std::vector<double> path_from_chaos(const ChaosCoordinates& xi, const TimeBasis& basis, int noise_modes, double t);

/// xi_i^k i.i.d. standard normal over the n_t x n_w rectangle.
ChaosCoordinates sample_coordinates(int time_modes, int noise_modes, CounterRng& rng);

}  // namespace chaos_ns
