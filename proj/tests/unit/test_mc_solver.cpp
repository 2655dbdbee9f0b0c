#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chaos_ns/errors.hpp"
#include "chaos_ns/mc_solver.hpp"
#include "chaos_ns/propagator.hpp"
#include "chaos_ns/spectral_ops.hpp"

using namespace chaos_ns;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

McConfig mc(NoiseModel noise, double nu, double dt, double horizon, int paths = 1, int stride = 1) {
  McConfig c(std::move(noise));
  c.nu = nu;
  c.dt = dt;
  c.horizon = horizon;
  c.paths = paths;
  c.output_stride = stride;
  c.seed = 77;
  return c;
}

NoiseModel additive_cosine(const Grid& g, double amp) {
  NoiseModel n(g, 1);
  SpectralField f(g);
  add_plane_wave(f, {1, 0}, {0.0, amp}, Phase::Cosine);
  n.set_g(0, f);
  return n;
}

}  // namespace

TEST_SUITE("mc-solver") {
  TEST_CASE("configuration errors") {
    const Grid g(8);
    CHECK(code_of([&] { McSolver s(mc(NoiseModel(g, 1), 0.0, 0.1, 1.0)); }) == ErrorCode::NotElliptic);
    CHECK(code_of([&] { McSolver s(mc(NoiseModel(g, 1), 0.1, 0.3, 1.0)); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { McSolver s(mc(NoiseModel(g, 1), 0.1, 0.1, 1.0, 0)); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { McSolver s(mc(NoiseModel(g, 1), 0.1, 0.1, 1.0, 1, 0)); }) == ErrorCode::InvalidArgument);
    McConfig c = mc(NoiseModel(g, 2), 0.1, 0.1, 1.0);
    c.g_of_u.push_back([](double, std::array<double, 2>, std::array<double, 2>) { return std::array{0.0, 0.0}; });
    CHECK(code_of([&] { McSolver s(c); }) == ErrorCode::InvalidArgument);
    const McSolver ok(mc(NoiseModel(g, 1), 0.1, 0.1, 1.0));
    CHECK(ok.steps() == 10);
  }

  TEST_CASE("clip weight") {
    CHECK(clip_weight(0.0) == 1.0);
    CHECK(clip_weight(1.0) == 1.0);
    CHECK(clip_weight(2.0) == 0.0);
    CHECK(clip_weight(7.0) == 0.0);
    CHECK(clip_weight(1.5) == doctest::Approx(0.5));
    double prev = 1.0;
    for (double r = 1.0; r <= 2.0; r += 0.01) {
      const double w = clip_weight(r);
      CHECK(w <= prev);
      CHECK(w >= 0.0);
      prev = w;
    }
  }

  TEST_CASE("without noise a path is the P = 0 propagator, bit for bit") {
    const Grid g(16);
    const double nu = 0.05, dt = 5e-3, horizon = 0.1;
    const SpectralField u0 = random_divfree_field(g, 2.0, 5, 5);
    const McSolver solver(mc(NoiseModel(g, 2), nu, dt, horizon, 1, 4));
    const Trajectory path = solver.simulate_path(u0, 0);

    PropagatorConfig pc;
    pc.nu = nu;
    pc.dt = dt;
    pc.horizon = horizon;
    const PropagatorSystem sys(enumerate_indices(0, 1, 2), NoiseModel(g, 2), pc);
    ChaosState st = initial_state(u0, sys);
    const PropagatorRun run = integrate(sys, st, horizon, 4);
    REQUIRE(run.samples.size() == path.samples.size());
    for (std::size_t i = 0; i < run.samples.size(); ++i) CHECK(run.samples[i].mean_energy == path.samples[i].energy);
    CHECK(path.fields.back() == st.coeffs[0]);
  }

  TEST_CASE("transport operators are skew") {
    const Grid g(16);
    const McSolver solver(mc(NoiseModel::kraichnan(g, {1.0, 1.0, 2}), 0.1, 0.01, 0.1));
    const SpectralField w = random_divfree_field(g, 1.5, 11, 5);
    for (int k = 0; k < solver.config().noise.noise_modes(); ++k) {
      const SpectralField b = solver.transport(k, w);
      CHECK(std::abs(inner(b, w)) <= 1e-13 * l2_norm(b) * l2_norm(w));
      CHECK(max_divergence(b) < 1e-12);
    }
    const McSolver silent(mc(NoiseModel(g, 1), 0.1, 0.01, 0.1));
    CHECK(l2_norm(silent.transport(0, w)) == 0.0);
    CHECK_THROWS_AS((void)silent.transport(1, w), Error);
  }

  TEST_CASE("Cayley transport conserves energy") {
    const Grid g(16);
    McConfig c = mc(NoiseModel::kraichnan(g, {2.0, 1.0, 2}), 1e-3, 0.01, 0.2);
    c.convection = false;
    const McSolver solver(c);
    const Trajectory path = solver.simulate_path(random_divfree_field(g, 1.5, 12, 5), 3);
    CHECK(path.max_energy_increase <= 1e-12);
    CHECK(path.max_cayley_iterations >= 2);
    CHECK(path.max_divergence < 1e-12);
  }

  TEST_CASE("stochastic energy inequality holds pathwise with convection") {
    const Grid g(16);
    const double nu = 0.02;
    const McSolver solver(mc(NoiseModel::kraichnan(g, {1.0, 1.0, 1}), nu, 5e-3, 0.2, 1, 5));
    const SpectralField u0 = random_divfree_field(g, 2.0, 13, 5);
    const double e0 = std::pow(l2_norm(u0), 2);
    for (std::uint64_t p = 0; p < 4; ++p) {
      const Trajectory path = solver.simulate_path(u0, p);
      CHECK(path.max_energy_increase <= 1e-10);
      for (const auto& s : path.samples) CHECK(s.energy + 2.0 * nu * s.dissipation <= e0 * (1.0 + 1e-6));
    }
  }

  TEST_CASE("paths are a function of (seed, index)") {
    const Grid g(16);
    const McSolver solver(mc(NoiseModel::kraichnan(g, {1.0, 1.0, 1}), 0.05, 0.01, 0.05));
    const SpectralField u0 = random_divfree_field(g, 2.0, 14, 5);
    const Trajectory a = solver.simulate_path(u0, 6), b = solver.simulate_path(u0, 6), c = solver.simulate_path(u0, 7);
    CHECK(a.fields.back() == b.fields.back());
    CHECK_FALSE(a.fields.back() == c.fields.back());
  }

  TEST_CASE("a zero driving path reproduces the noise-free solution") {
    const Grid g(16);
    McConfig c = mc(additive_cosine(g, 0.5), 0.05, 0.01, 0.05);
    const McSolver additive(c);
    const SpectralField u0 = random_divfree_field(g, 2.0, 15, 5);
    const Trajectory driven = additive.simulate_driven(u0, [](double) { return std::vector<double>{0.0}; });
    const McSolver clean(mc(NoiseModel(g, 1), 0.05, 0.01, 0.05));
    CHECK(driven.fields.back() == clean.simulate_path(u0, 0).fields.back());
  }

  TEST_CASE("additive step adds S g dW") {
    const Grid g(16);
    const McSolver solver(mc(additive_cosine(g, 0.5), 0.05, 0.01, 0.05));
    const McSolver clean(mc(NoiseModel(g, 1), 0.05, 0.01, 0.05));
    const SpectralField u0 = random_divfree_field(g, 2.0, 16, 5);
    SpectralField a = u0, b = u0;
    const double dw = 0.3;
    solver.step_path(a, 0.0, std::vector{dw});
    clean.step_path(b, 0.0, std::vector{0.0});
    CHECK(l2_norm(a - b - dw * leray_project(solver.config().noise.g(0))) < 1e-14);
  }

  TEST_CASE("ensemble statistics do not depend on workers") {
    const Grid g(8);
    const McSolver solver(mc(NoiseModel::kraichnan(g, {1.0, 1.0, 1}), 0.05, 0.01, 0.05, 70, 1));
    const SpectralField u0 = random_divfree_field(g, 2.0, 17);
    const EnsembleStats a = solver.run_ensemble(u0, 1), b = solver.run_ensemble(u0, 3);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      CHECK(a.samples[i].mean_energy == b.samples[i].mean_energy);
      CHECK(a.samples[i].energy_se == b.samples[i].energy_se);
      CHECK(a.samples[i].variance_se == b.samples[i].variance_se);
      CHECK(a.mean_fields[i] == b.mean_fields[i]);
    }
    CHECK(a.paths == 70);
    CHECK_FALSE(a.zero_variance);
    CHECK(a.samples.back().variance_se > 0.0);
  }

  TEST_CASE("single-path ensembles report no standard error") {
    const Grid g(8);
    const McSolver solver(mc(NoiseModel::kraichnan(g, {1.0, 1.0, 1}), 0.05, 0.01, 0.03));
    const EnsembleStats s = solver.run_ensemble(random_divfree_field(g, 2.0, 18));
    CHECK(s.zero_variance);
    for (const auto& x : s.samples) {
      CHECK(x.energy_se == 0.0);
      CHECK(x.variance_se == 0.0);
    }
  }

  TEST_CASE("mollified convection is energy neutral for every cutoff") {
    const Grid g(32);
    const SpectralField u = random_divfree_field(g, 1.0, 19);
    const double scale = std::pow(l2_norm(u), 2) * norms(u).h1_seminorm;
    for (int cutoff = 0; cutoff <= g.n() / 2; ++cutoff) {
      McConfig c = mc(NoiseModel(g, 1), 0.1, 0.01, 0.1);
      c.mollifier_cutoff = cutoff;
      const McSolver solver(c);
      std::vector<SpectralField> out;
      solver.drift(std::span<const SpectralField>(&u, 1), 0.0, out, nullptr);
      CHECK(std::abs(inner(out[0], u)) <= 1e-11 * scale);
    }
  }

  TEST_CASE("a cutoff at or above the band leaves the step unchanged") {
    const Grid g(32);
    const SpectralField u0 = random_divfree_field(g, 1.5, 20);
    const McSolver plain(mc(NoiseModel::kraichnan(g, {1.0, 1.0, 1}), 0.05, 0.01, 0.1));
    const std::vector<double> dw(8, 0.05);
    SpectralField a = u0;
    plain.step_path(a, 0.0, dw);
    for (int cutoff : {g.dealias_limit(), g.n() / 2, 100}) {
      McConfig c = mc(NoiseModel::kraichnan(g, {1.0, 1.0, 1}), 0.05, 0.01, 0.1);
      c.mollifier_cutoff = cutoff;
      SpectralField b = u0;
      McSolver(c).step_path(b, 0.0, dw);
      CHECK(a == b);
    }
    McConfig low = mc(NoiseModel::kraichnan(g, {1.0, 1.0, 1}), 0.05, 0.01, 0.1);
    low.mollifier_cutoff = 2;
    SpectralField b = u0;
    McSolver(low).step_path(b, 0.0, dw);
    CHECK_FALSE(a == b);
  }

  TEST_CASE("pure diffusion decays each mode exactly") {
    const Grid g(16);
    McConfig c = mc(NoiseModel(g, 1), 0.3, 0.02, 0.1);
    c.convection = false;
    const McSolver solver(c);
    SpectralField u(g);
    add_plane_wave(u, {2, 1}, {1.0, -2.0}, Phase::Cosine);
    const SpectralField u0 = u;
    solver.step_path(u, 0.0, std::vector{0.0});
    CHECK(l2_norm(u - std::exp(-0.3 * 5.0 * 0.02) * u0) < 1e-15);
  }

  TEST_CASE("zero-noise ensembles have zero standard error") {
    const Grid g(8);
    const McSolver solver(mc(NoiseModel(g, 2), 0.1, 0.01, 0.05, 40, 1));
    const EnsembleStats s = solver.run_ensemble(taylor_green(g));
    for (const auto& x : s.samples) {
      CHECK(x.energy_se == 0.0);
      CHECK(x.variance_se == 0.0);
    }
  }

  TEST_CASE("a path built from xi = 0 is the deterministic trajectory") {
    const Grid g(16);
    const McSolver solver(mc(NoiseModel::kraichnan(g, {1.0, 1.0, 1}), 0.05, 0.01, 0.05));
    const SpectralField u0 = random_divfree_field(g, 2.0, 21, 5);
    ChaosCoordinates xi;
    for (int i = 1; i <= 3; ++i)
      for (int k = 1; k <= 8; ++k) xi[Slot{i, k}] = 0.0;
    const TimeBasis basis(0.05, 3);
    const Trajectory driven =
        solver.simulate_driven(u0, [&](double t) { return path_from_chaos(xi, basis, 8, std::min(t, 0.05)); });
    const Trajectory still = solver.simulate_driven(u0, [](double) { return std::vector<double>(8, 0.0); });
    CHECK(driven.fields.back() == still.fields.back());
    // The Ito drift keeps the extra dissipation of the unprojected noise part.
    const McSolver clean(mc(NoiseModel(g, 8), 0.05, 0.01, 0.05));
    CHECK(std::pow(l2_norm(still.fields.back()), 2) < std::pow(l2_norm(clean.simulate_path(u0, 0).fields.back()), 2));
  }

  TEST_CASE("path increments must match the noise mode count") {
    const Grid g(8);
    const McSolver solver(mc(NoiseModel(g, 2), 0.1, 0.01, 0.05));
    SpectralField u = taylor_green(g);
    CHECK(code_of([&] { solver.step_path(u, 0.0, std::vector{0.1}); }) == ErrorCode::ShapeMismatch);
  }

  TEST_CASE("ensemble mean and variance of the linear additive problem") {
    // du = nu lap u dt + g dW with g = amp cos(x) e_y: mean exp(-nu t) S u0,
    // E|u - mean|^2 = |g|^2 (1 - exp(-2 nu t)) / (2 nu).
    const Grid g(8);
    const double nu = 0.3, amp = 0.5, horizon = 0.5;
    McConfig c = mc(additive_cosine(g, amp), nu, 0.01, horizon, 1024, 50);
    c.convection = false;
    const McSolver solver(c);
    SpectralField u0(g);
    add_plane_wave(u0, {0, 1}, {1.0, 0.0}, Phase::Sine);
    const EnsembleStats s = solver.run_ensemble(u0);
    const EnsembleSample& last = s.samples.back();
    const double g2 = amp * amp * 2.0 * std::numbers::pi * std::numbers::pi;
    const double var = g2 * (1.0 - std::exp(-2.0 * nu * horizon)) / (2.0 * nu);
    const SpectralField mean = std::exp(-nu * horizon) * u0;
    const double mean_error = l2_norm(s.mean_fields.back() - mean);
    CHECK(mean_error <= 5.0 * std::sqrt(var / 1024.0));
    const double m2 = std::pow(l2_norm(mean), 2) + var;
    CHECK(std::abs(last.mean_energy - m2) <= 5.0 * last.energy_se);
  }
}
