#pragma once

// Periodic square lattice [0, L)^2 with an FFTW-backed real transform pair.
// Spectral storage is the r2c half plane: n rows (x wave index) by n/2+1
// columns (y wave index >= 0). Forward transforms carry 1/n^2, so stored
// coefficients are mode amplitudes.

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>

namespace chaos_ns {

using Complex = std::complex<double>;

class Grid {
 public:
  static constexpr int kDim = 2;

  explicit Grid(int n, double length = 2.0 * std::numbers::pi);

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] double length() const noexcept { return length_; }
  [[nodiscard]] int half() const noexcept { return n_ / 2 + 1; }
  [[nodiscard]] std::size_t spectral_size() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(half());
  }
  [[nodiscard]] std::size_t physical_size() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }
  [[nodiscard]] std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(half()) + static_cast<std::size_t>(col);
  }

  /// Signed lattice wave index of a spectral row, in {-n/2+1, ..., n/2}.
  [[nodiscard]] int wave_index(int row) const noexcept { return row <= n_ / 2 ? row : row - n_; }
  [[nodiscard]] int row_of(int wave) const noexcept { return wave >= 0 ? wave : wave + n_; }
  [[nodiscard]] bool is_nyquist(int wave) const noexcept { return wave == n_ / 2; }

  /// 2*pi/L times the wave index.
  [[nodiscard]] double wavenumber(int wave) const noexcept { return scale_ * wave; }
  /// Wavenumber used by odd symbols (derivatives, Riesz projections): the
  /// unpaired Nyquist mode maps to zero.
  [[nodiscard]] double odd_wavenumber(int wave) const noexcept { return is_nyquist(wave) ? 0.0 : scale_ * wave; }

  /// 1 for the self-conjugate columns (0 and n/2), else 2: multiplicity of a
  /// stored coefficient in full-lattice sums.
  [[nodiscard]] double column_weight(int col) const noexcept { return (col == 0 || col == n_ / 2) ? 1.0 : 2.0; }

  /// 2/3-rule band: modes with every |k_j| <= floor(n/3) are retained.
  [[nodiscard]] int dealias_limit() const noexcept { return n_ / 3; }

  /// Physical coordinate of sample index i along an axis.
  [[nodiscard]] double coordinate(int i) const noexcept { return length_ * i / n_; }

  /// Spectral -> physical. `scratch` must hold spectral_size() values and is clobbered.
  void inverse(std::span<Complex> scratch, std::span<double> out) const;
  /// Physical -> spectral, scaled by 1/n^2. `in` is not modified.
  void forward(std::span<const double> in, std::span<Complex> out) const;

  friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.n_ == b.n_ && a.length_ == b.length_; }

 private:
  int n_;
  double length_;
  double scale_;
};

}  // namespace chaos_ns
