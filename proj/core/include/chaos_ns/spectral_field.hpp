#pragma once

// Real scalar and 2-vector fields on the periodic grid, stored by Fourier
// coefficients. Parseval reads |v|_2^2 = L^2 * sum_k |v_hat(k)|^2.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "chaos_ns/grid.hpp"

namespace chaos_ns {

class ScalarSpectralField {
 public:
  explicit ScalarSpectralField(const Grid& grid) : grid_(grid), coeffs_(grid.spectral_size()) {}

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<Complex> coeffs() noexcept { return coeffs_; }
  [[nodiscard]] std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  Complex& operator()(int row, int col) { return coeffs_[grid_.index(row, col)]; }
  const Complex& operator()(int row, int col) const { return coeffs_[grid_.index(row, col)]; }

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

class SpectralField {
 public:
  static constexpr int kComponents = Grid::kDim;

  explicit SpectralField(const Grid& grid);

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<Complex> component(int l) noexcept { return coeffs_[static_cast<std::size_t>(l)]; }
  [[nodiscard]] std::span<const Complex> component(int l) const noexcept {
    return coeffs_[static_cast<std::size_t>(l)];
  }
  Complex& operator()(int l, int row, int col) { return coeffs_[static_cast<std::size_t>(l)][grid_.index(row, col)]; }
  const Complex& operator()(int l, int row, int col) const {
    return coeffs_[static_cast<std::size_t>(l)][grid_.index(row, col)];
  }

  /// Set by operations whose output is known to satisfy k . v_hat(k) = 0.
  [[nodiscard]] bool divergence_free() const noexcept { return divergence_free_; }
  void set_divergence_free(bool flag) noexcept { divergence_free_ = flag; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  /// this += s * other
  SpectralField& axpy(double s, const SpectralField& other);
  void set_zero();

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  /// Bitwise coefficient equality (flag excluded).
  friend bool operator==(const SpectralField& a, const SpectralField& b) {
    return a.grid_ == b.grid_ && a.coeffs_ == b.coeffs_;
  }

 private:
  void check_same_grid(const SpectralField& other) const;

  Grid grid_;
  std::array<std::vector<Complex>, kComponents> coeffs_;
  bool divergence_free_ = false;
};

/// Grid samples of a vector field, row-major (x index slowest) per component.
struct VectorSamples {
  Grid grid;
  std::array<std::vector<double>, Grid::kDim> components;

  explicit VectorSamples(const Grid& g)
      : grid(g), components{std::vector<double>(g.physical_size()), std::vector<double>(g.physical_size())} {}
};

VectorSamples to_grid(const SpectralField& f);
SpectralField from_grid(const VectorSamples& samples);
std::vector<double> to_grid(const ScalarSpectralField& f);
ScalarSpectralField scalar_from_grid(std::span<const double> samples, const Grid& grid);

/// Largest |c(k) - conj(c(-k))| over the self-conjugate columns.
double hermitian_defect(const SpectralField& f);
double hermitian_defect(const ScalarSpectralField& f);

}  // namespace chaos_ns
