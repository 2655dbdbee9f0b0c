#include "chaos_ns/grid.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "chaos_ns/errors.hpp"

namespace chaos_ns {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per size and live for the process.
const PlanPair& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const std::size_t real_size = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  const std::size_t spec_size = static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
  std::vector<double> real(real_size);
  std::vector<Complex> spec(spec_size);
  auto* cspec = reinterpret_cast<fftw_complex*>(spec.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_2d(n, n, real.data(), cspec, flags);
  p.inverse = fftw_plan_dft_c2r_2d(n, n, cspec, real.data(), flags);
  if (p.forward == nullptr || p.inverse == nullptr)
    throw Error(ErrorCode::InvalidArgument, "FFTW could not plan an " + std::to_string(n) + "^2 transform");
  return cache.emplace(n, p).first->second;
}

}  // namespace

Grid::Grid(int n, double length) : n_(n), length_(length), scale_(2.0 * std::numbers::pi / length) {
  if (n < 4 || (n & (n - 1)) != 0)
    throw Error(ErrorCode::InvalidArgument, "grid size must be a power of two >= 4, got " + std::to_string(n));
  if (!(length > 0.0)) throw Error(ErrorCode::InvalidArgument, "domain period must be positive");
}

void Grid::inverse(std::span<Complex> scratch, std::span<double> out) const {
  if (scratch.size() != spectral_size() || out.size() != physical_size())
    throw Error(ErrorCode::ShapeMismatch, "inverse transform buffer sizes do not match the grid");
  fftw_execute_dft_c2r(plans_for(n_).inverse, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
}

void Grid::forward(std::span<const double> in, std::span<Complex> out) const {
  if (in.size() != physical_size() || out.size() != spectral_size())
    throw Error(ErrorCode::ShapeMismatch, "forward transform buffer sizes do not match the grid");
  // r2c never writes its input, the const_cast only satisfies the C signature.
  fftw_execute_dft_r2c(plans_for(n_).forward, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double norm = 1.0 / static_cast<double>(physical_size());
  for (auto& c : out) c *= norm;
}

}  // namespace chaos_ns
