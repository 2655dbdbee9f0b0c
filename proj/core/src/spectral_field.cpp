#include "chaos_ns/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chaos_ns/errors.hpp"

namespace chaos_ns {

SpectralField::SpectralField(const Grid& grid)
    : grid_(grid),
      coeffs_{std::vector<Complex>(grid.spectral_size()), std::vector<Complex>(grid.spectral_size())},
      divergence_free_(true) {}

void SpectralField::check_same_grid(const SpectralField& other) const {
  if (!(grid_ == other.grid_)) throw Error(ErrorCode::ShapeMismatch, "fields live on different grids");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  check_same_grid(other);
  for (std::size_t l = 0; l < coeffs_.size(); ++l)
    for (std::size_t i = 0; i < coeffs_[l].size(); ++i) coeffs_[l][i] += other.coeffs_[l][i];
  divergence_free_ = divergence_free_ && other.divergence_free_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  check_same_grid(other);
  for (std::size_t l = 0; l < coeffs_.size(); ++l)
    for (std::size_t i = 0; i < coeffs_[l].size(); ++i) coeffs_[l][i] -= other.coeffs_[l][i];
  divergence_free_ = divergence_free_ && other.divergence_free_;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& comp : coeffs_)
    for (auto& c : comp) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  check_same_grid(other);
  for (std::size_t l = 0; l < coeffs_.size(); ++l)
    for (std::size_t i = 0; i < coeffs_[l].size(); ++i) coeffs_[l][i] += s * other.coeffs_[l][i];
  divergence_free_ = divergence_free_ && other.divergence_free_;
  return *this;
}

void SpectralField::set_zero() {
  for (auto& comp : coeffs_) std::fill(comp.begin(), comp.end(), Complex{});
  divergence_free_ = true;
}

VectorSamples to_grid(const SpectralField& f) {
  const Grid& g = f.grid();
  VectorSamples out(g);
  std::vector<Complex> scratch(g.spectral_size());
  for (int l = 0; l < Grid::kDim; ++l) {
    std::copy(f.component(l).begin(), f.component(l).end(), scratch.begin());
    g.inverse(scratch, out.components[static_cast<std::size_t>(l)]);
  }
  return out;
}

SpectralField from_grid(const VectorSamples& samples) {
  const Grid& g = samples.grid;
  for (const auto& c : samples.components)
    if (c.size() != g.physical_size())
      throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(g.physical_size()) + " samples per component");
  SpectralField out(g);
  for (int l = 0; l < Grid::kDim; ++l) g.forward(samples.components[static_cast<std::size_t>(l)], out.component(l));
  out.set_divergence_free(false);
  return out;
}

std::vector<double> to_grid(const ScalarSpectralField& f) {
  const Grid& g = f.grid();
  std::vector<Complex> scratch(f.coeffs().begin(), f.coeffs().end());
  std::vector<double> out(g.physical_size());
  g.inverse(scratch, out);
  return out;
}

ScalarSpectralField scalar_from_grid(std::span<const double> samples, const Grid& grid) {
  if (samples.size() != grid.physical_size())
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(grid.physical_size()) + " samples");
  ScalarSpectralField out(grid);
  grid.forward(samples, out.coeffs());
  return out;
}

namespace {

double defect(std::span<const Complex> c, const Grid& g) {
  double worst = 0.0;
  for (int col : {0, g.n() / 2}) {
    for (int row = 0; row < g.n(); ++row) {
      const int partner = g.row_of(-g.wave_index(row)) % g.n();
      worst = std::max(worst, std::abs(c[g.index(row, col)] - std::conj(c[g.index(partner, col)])));
    }
  }
  return worst;
}

}  // namespace

double hermitian_defect(const SpectralField& f) {
  return std::max(defect(f.component(0), f.grid()), defect(f.component(1), f.grid()));
}

double hermitian_defect(const ScalarSpectralField& f) { return defect(f.coeffs(), f.grid()); }

}  // namespace chaos_ns
