#include "chaos_ns/noise_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "chaos_ns/errors.hpp"
#include "chaos_ns/spectral_ops.hpp"

namespace chaos_ns {

Matrix2 spectrum_tensor(std::array<double, 2> z, double c0, double kappa) {
  const double z2 = z[0] * z[0] + z[1] * z[1];
  if (z2 == 0.0) throw Error(ErrorCode::ZeroWavevector, "the spectrum tensor is singular at z = 0");
  if (!(c0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "C0 must be positive");
  if (!(kappa > 0.0 && kappa < 2.0)) throw Error(ErrorCode::InvalidArgument, "kappa must lie in (0, 2)");
  constexpr double d = 2.0;
  const double scalar = c0 / ((d - 1.0) * std::pow(1.0 + z2, 0.5 * (d + kappa)));
  Matrix2 proj;
  proj << 1.0 - z[0] * z[0] / z2, -z[0] * z[1] / z2, -z[1] * z[0] / z2, 1.0 - z[1] * z[1] / z2;
  return scalar * proj;
}

void add_plane_wave(SpectralField& f, std::array<int, 2> wave, std::array<double, 2> amplitude, Phase phase) {
  const Grid& g = f.grid();
  const int mx = wave[0], my = wave[1];
  const int lim = g.n() / 2;
  if (std::abs(mx) >= lim || std::abs(my) >= lim)
    throw Error(ErrorCode::InvalidArgument, "plane wave outside the non-Nyquist lattice");
  for (int l = 0; l < Grid::kDim; ++l) {
    const double a = amplitude[static_cast<std::size_t>(l)];
    if (a == 0.0) continue;
    // coefficient of exp(i m.x)
    const Complex c = phase == Phase::Cosine ? Complex(0.5 * a, 0.0) : Complex(0.0, -0.5 * a);
    if (mx == 0 && my == 0) {
      if (phase == Phase::Cosine) f(l, 0, 0) += a;
      continue;
    }
    if (my > 0) {
      f(l, g.row_of(mx), my) += c;
    } else if (my < 0) {
      f(l, g.row_of(-mx), -my) += std::conj(c);
    } else {
      f(l, g.row_of(mx), 0) += c;
      f(l, g.row_of(-mx), 0) += std::conj(c);
    }
  }
  f.set_divergence_free(false);
}

int kraichnan_representatives(int cutoff) {
  const int side = 2 * cutoff + 1;
  return (side * side - 1) / 2;
}

namespace {

std::vector<std::array<int, 2>> representatives(int cutoff) {
  std::vector<std::array<int, 2>> reps;
  for (int shell = 1; shell <= cutoff; ++shell)
    for (int mx = 0; mx <= shell; ++mx)
      for (int my = -shell; my <= shell; ++my) {
        if (std::max(std::abs(mx), std::abs(my)) != shell) continue;
        if (mx == 0 && my <= 0) continue;
        reps.push_back({mx, my});
      }
  return reps;
}

}  // namespace

KraichnanBasis build_kraichnan_basis(const Grid& grid, const KraichnanParams& params) {
  if (params.cutoff < 1 || params.cutoff > grid.dealias_limit()) {
    throw Error(ErrorCode::CutoffOutOfRange, "K_noise = " + std::to_string(params.cutoff) + " must lie in [1, " +
                                                 std::to_string(grid.dealias_limit()) + "]");
  }
  KraichnanBasis out;
  out.eta = 1.0 / (grid.length() * grid.length());
  for (const auto& m : representatives(params.cutoff)) {
    const std::array<double, 2> z{grid.wavenumber(m[0]), grid.wavenumber(m[1])};
    const double trace = spectrum_tensor(z, params.c0, params.kappa).trace();
    const double amp = std::sqrt(2.0 * out.eta * trace);
    const double norm = std::hypot(z[0], z[1]);
    const std::array<double, 2> dir{-z[1] / norm * amp, z[0] / norm * amp};
    for (Phase phase : {Phase::Cosine, Phase::Sine}) {
      SpectralField s(grid);
      add_plane_wave(s, m, dir, phase);
      s.set_divergence_free(true);
      out.sigma.push_back(std::move(s));
      out.modes.push_back(KraichnanMode{m, phase, amp});
    }
  }
  out.ito_correction = ito_correction_from_fields(out.sigma);
  return out;
}

namespace {

std::array<std::vector<double>, 3> pointwise_sigma_tensor(const std::vector<SpectralField>& sigma) {
  if (sigma.empty()) return {};
  const Grid& g = sigma.front().grid();
  std::array<std::vector<double>, 3> acc{std::vector<double>(g.physical_size()), std::vector<double>(g.physical_size()),
                                         std::vector<double>(g.physical_size())};
  for (const auto& s : sigma) {
    const VectorSamples v = to_grid(s);
    for (std::size_t i = 0; i < g.physical_size(); ++i) {
      acc[0][i] += v.components[0][i] * v.components[0][i];
      acc[1][i] += v.components[0][i] * v.components[1][i];
      acc[2][i] += v.components[1][i] * v.components[1][i];
    }
  }
  return acc;
}

}  // namespace

Matrix2 ito_correction_from_fields(const std::vector<SpectralField>& sigma) {
  Matrix2 out = Matrix2::Zero();
  if (sigma.empty()) return out;
  const auto acc = pointwise_sigma_tensor(sigma);
  std::array<double, 3> mean{};
  for (int c = 0; c < 3; ++c) {
    double s = 0.0;
    for (double x : acc[static_cast<std::size_t>(c)]) s += x;
    mean[static_cast<std::size_t>(c)] = s / static_cast<double>(acc[0].size());
  }
  out << 0.5 * mean[0], 0.5 * mean[1], 0.5 * mean[1], 0.5 * mean[2];
  return out;
}

double ito_inhomogeneity(const std::vector<SpectralField>& sigma) {
  if (sigma.empty()) return 0.0;
  const auto acc = pointwise_sigma_tensor(sigma);
  double worst = 0.0;
  for (const auto& comp : acc) {
    double mean = 0.0;
    for (double x : comp) mean += x;
    mean /= static_cast<double>(comp.size());
    for (double x : comp) worst = std::max(worst, std::abs(x - mean));
  }
  return worst;
}

NoiseModel::NoiseModel(const Grid& grid, int noise_modes) : grid_(grid) {
  if (noise_modes < 0) throw Error(ErrorCode::InvalidArgument, "noise mode count must be >= 0");
  sigma_.assign(static_cast<std::size_t>(noise_modes), SpectralField(grid));
  g_.assign(static_cast<std::size_t>(noise_modes), SpectralField(grid));
  for (auto& hi : h_) hi.assign(static_cast<std::size_t>(noise_modes), SpectralField(grid));
}

NoiseModel NoiseModel::kraichnan(const Grid& grid, const KraichnanParams& params) {
  KraichnanBasis basis = build_kraichnan_basis(grid, params);
  NoiseModel out(grid, static_cast<int>(basis.sigma.size()));
  out.sigma_ = std::move(basis.sigma);
  out.ito_correction_ = basis.ito_correction;
  out.modes_ = std::move(basis.modes);
  out.spectrum_ = params;
  out.refresh_flags();
  return out;
}

namespace {

bool nonzero(const SpectralField& f) {
  for (int l = 0; l < Grid::kDim; ++l)
    for (const auto& c : f.component(l))
      if (c != Complex{}) return true;
  return false;
}

}  // namespace

void NoiseModel::refresh_flags() {
  has_transport_ = std::any_of(sigma_.begin(), sigma_.end(), nonzero);
  has_additive_ = std::any_of(g_.begin(), g_.end(), nonzero);
  has_h_ = false;
  for (const auto& hi : h_) has_h_ = has_h_ || std::any_of(hi.begin(), hi.end(), nonzero);
}

void NoiseModel::set_sigma(int k, SpectralField field) {
  if (!(field.grid() == grid_)) throw Error(ErrorCode::ShapeMismatch, "sigma field on a different grid");
  if (max_divergence(field) > 1e-12) throw Error(ErrorCode::NotDivergenceFree, "sigma fields must be divergence-free");
  field.set_divergence_free(true);
  sigma_.at(static_cast<std::size_t>(k)) = std::move(field);
  ito_correction_ = ito_correction_from_fields(sigma_);
  spectrum_.reset();
  refresh_flags();
}

void NoiseModel::set_g(int k, SpectralField field) {
  if (!(field.grid() == grid_)) throw Error(ErrorCode::ShapeMismatch, "g field on a different grid");
  g_.at(static_cast<std::size_t>(k)) = std::move(field);
  refresh_flags();
}

void NoiseModel::set_h(int i, int k, SpectralField field) {
  if (!(field.grid() == grid_)) throw Error(ErrorCode::ShapeMismatch, "h field on a different grid");
  h_.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)) = std::move(field);
  refresh_flags();
}

double check_ellipticity(double nu, const Matrix2& ito_correction) {
  const Matrix2 a = nu * Matrix2::Identity() + ito_correction;
  const Matrix2 reduced = a - ito_correction;
  Eigen::SelfAdjointEigenSolver<Matrix2> eig(0.5 * (reduced + reduced.transpose()));
  const double delta = eig.eigenvalues().minCoeff();
  if (!(delta > 0.0))
    throw Error(ErrorCode::NotElliptic, "a - sigma sigma / 2 has smallest eigenvalue " + std::to_string(delta));
  return delta;
}

std::vector<double> wiener_increments(double dt, int noise_modes, CounterRng& rng) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const double scale = std::sqrt(dt);
  std::vector<double> dw(static_cast<std::size_t>(noise_modes));
  for (double& x : dw) x = scale * rng.normal();
  return dw;
}

std::vector<double> path_from_chaos(const ChaosCoordinates& xi, const TimeBasis& basis, int noise_modes, double t) {
  std::vector<double> w(static_cast<std::size_t>(noise_modes), 0.0);
  for (int i = 1; i <= basis.size(); ++i) {
    const double mi = basis.antiderivative(i, t);
    for (int k = 1; k <= noise_modes; ++k) {
      auto it = xi.find(Slot{i, k});
      if (it == xi.end())
        throw Error(ErrorCode::MissingCoordinate, "xi_" + std::to_string(i) + "^" + std::to_string(k) + " missing");
      w[static_cast<std::size_t>(k - 1)] += it->second * mi;
    }
  }
  return w;
}

ChaosCoordinates sample_coordinates(int time_modes, int noise_modes, CounterRng& rng) {
  ChaosCoordinates xi;
  for (int i = 1; i <= time_modes; ++i)
    for (int k = 1; k <= noise_modes; ++k) xi[Slot{i, k}] = rng.normal();
  return xi;
}

}  // namespace chaos_ns
