#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chaos_ns/errors.hpp"
#include "chaos_ns/propagator.hpp"
#include "chaos_ns/quadrature.hpp"
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

PropagatorConfig config(double nu, double dt, double horizon) {
  PropagatorConfig c;
  c.nu = nu;
  c.dt = dt;
  c.horizon = horizon;
  return c;
}

// sigma (x) = amp * cos(x) e_y, additive in one noise mode.
NoiseModel additive_cosine(const Grid& g, double amp) {
  NoiseModel n(g, 1);
  SpectralField f(g);
  add_plane_wave(f, {1, 0}, {0.0, amp}, Phase::Cosine);
  n.set_g(0, f);
  return n;
}

}  // namespace

TEST_SUITE("propagator") {
  TEST_CASE("system setup") {
    const Grid g(16);
    const PropagatorSystem s(enumerate_indices(2, 2, 3), NoiseModel(g, 3), config(0.1, 0.01, 1.0));
    CHECK(s.index_set().size() == 28);
    CHECK(s.coupling_table().size() == 28);
    CHECK(s.time_basis().size() == 2);
    CHECK(s.ellipticity() == doctest::Approx(0.1));
    CHECK(code_of([&] { PropagatorSystem(enumerate_indices(0, 1, 1), NoiseModel(g, 1), config(0.0, 0.01, 1.0)); }) ==
          ErrorCode::NotElliptic);
  }

  TEST_CASE("Kraichnan Ito correction enters the diffusion tensor") {
    const Grid g(16);
    NoiseModel n = NoiseModel::kraichnan(g, {1.0, 1.0, 1});
    const Matrix2 ito = n.ito_correction();
    const int nw = n.noise_modes();
    const PropagatorSystem s(enumerate_indices(1, 1, nw), std::move(n), config(0.05, 0.01, 1.0));
    CHECK((s.diffusion() - (0.05 * Matrix2::Identity() + ito)).norm() < 1e-16);
    CHECK(s.ellipticity() == doctest::Approx(0.05));
  }

  TEST_CASE("initial state") {
    const Grid g(16);
    const PropagatorSystem s(enumerate_indices(1, 2, 1), NoiseModel(g, 1), config(0.1, 0.01, 1.0));
    SpectralField u0 = random_divfree_field(g, 1.5, 3);
    u0 += random_gradient_field(g, 1.5, 4);
    const ChaosState st = initial_state(u0, s);
    CHECK(st.coeffs.size() == 3);
    CHECK(max_divergence(st.coeffs[0]) < 1e-13);
    CHECK(l2_norm(st.coeffs[1]) == 0.0);
    CHECK(second_moment(st, s.index_set()) == doctest::Approx(std::pow(l2_norm(leray_project(u0)), 2)));
    CHECK(code_of([&] { (void)initial_state(SpectralField(Grid(32)), s); }) == ErrorCode::ShapeMismatch);
  }

  TEST_CASE("Taylor-Green decays at the exact rate") {
    const Grid g(16);
    const double nu = 0.1, dt = 1e-2, horizon = 0.5;
    const PropagatorSystem s(enumerate_indices(0, 1, 1), NoiseModel(g, 1), config(nu, dt, horizon));
    ChaosState st = initial_state(taylor_green(g), s);
    const double e0 = second_moment(st, s.index_set());
    const PropagatorRun run = integrate(s, st, horizon, 10);
    CHECK(run.samples.size() == 6);
    for (const auto& p : run.samples) {
      CHECK(p.chaos_energy == doctest::Approx(e0 * std::exp(-4.0 * nu * p.t)).epsilon(1e-12));
      CHECK(p.mean_energy == p.chaos_energy);
      CHECK(p.max_divergence < 1e-14);
    }
    CHECK(st.t == doctest::Approx(horizon));
  }

  TEST_CASE("rhs at Taylor-Green is pure diffusion") {
    const Grid g(16);
    const PropagatorSystem s(enumerate_indices(0, 1, 1), NoiseModel(g, 1), config(0.3, 1e-2, 1.0));
    const ChaosState st = initial_state(taylor_green(g), s);
    const auto r = rhs(s, st, 0.0);
    CHECK(l2_norm(r[0] + 0.6 * st.coeffs[0]) < 1e-13);
    CHECK(l2_norm(s.kernel().nonlinear_term(st.coeffs, 0)) < 1e-13);
  }

  TEST_CASE("nonlinear term at P = 0 is the projected convection") {
    const Grid g(16);
    const PropagatorSystem s(enumerate_indices(0, 1, 1), NoiseModel(g, 1), config(0.1, 1e-2, 1.0));
    const ChaosState st = initial_state(random_divfree_field(g, 1.5, 17), s);
    const SpectralField expect = -1.0 * convect(st.coeffs[0], st.coeffs[0]);
    CHECK(l2_norm(s.kernel().nonlinear_term(st.coeffs, 0) - expect) <= 1e-13 * l2_norm(expect));
  }

  TEST_CASE("zero stays zero without forcing or additive noise") {
    const Grid g(16);
    NoiseModel n = NoiseModel::kraichnan(g, {1.0, 1.0, 2});
    const int nw = n.noise_modes();
    const PropagatorSystem s(enumerate_indices(1, 2, nw), std::move(n), config(0.1, 1e-2, 0.1));
    ChaosState st = initial_state(SpectralField(g), s);
    integrate(s, st, 0.1, 5);
    CHECK(second_moment(st, s.index_set()) == 0.0);
  }

  TEST_CASE("linear additive noise against the projected Ornstein-Uhlenbeck variance") {
    const Grid g(16);
    const double nu = 0.2, amp = 0.5, horizon = 0.5, dt = 5e-3;
    const int nt = 4;
    const PropagatorSystem s(enumerate_indices(1, nt, 1), additive_cosine(g, amp), [&] {
      PropagatorConfig c = config(nu, dt, horizon);
      c.convection = false;
      return c;
    }());
    ChaosState st = initial_state(SpectralField(g), s);
    integrate(s, st, horizon, 100);
    // u_{e_i}(T) = g int_0^T exp(-nu (T - s)) m_i(s) ds; |g|^2 = amp^2 * 2 pi^2
    const QuadratureRule q = gauss_legendre(40, 0.0, horizon);
    double expect = 0.0;
    for (int i = 1; i <= nt; ++i) {
      double c = 0.0;
      for (std::size_t p = 0; p < q.nodes.size(); ++p)
        c += q.weights[p] * std::exp(-nu * (horizon - q.nodes[p])) * s.time_basis().value(i, q.nodes[p]);
      expect += c * c;
    }
    expect *= amp * amp * 2.0 * std::numbers::pi * std::numbers::pi;
    CHECK(l2_norm(st.coeffs[0]) == 0.0);
    CHECK(second_moment(st, s.index_set()) == doctest::Approx(expect).epsilon(1e-4));
  }

  TEST_CASE("coefficients stay divergence-free under transport noise") {
    const Grid g(16);
    NoiseModel n = NoiseModel::kraichnan(g, {0.5, 1.0, 1});
    const int nw = n.noise_modes();
    const PropagatorSystem s(enumerate_indices(2, 1, nw), std::move(n), config(0.1, 5e-3, 0.05));
    ChaosState st = initial_state(random_divfree_field(g, 2.0, 8, 4), s);
    const PropagatorRun run = integrate(s, st, 0.05, 5);
    for (const auto& p : run.samples) CHECK(p.max_divergence < 1e-12);
    CHECK(second_moment(st, s.index_set()) > l2_norm(st.coeffs[0]) * l2_norm(st.coeffs[0]));
  }

  TEST_CASE("worker count does not change results") {
    const Grid g(16);
    NoiseModel n = NoiseModel::kraichnan(g, {0.5, 1.0, 1});
    const int nw = n.noise_modes();
    const PropagatorSystem s(enumerate_indices(2, 1, nw), std::move(n), config(0.1, 5e-3, 0.05));
    const SpectralField u0 = random_divfree_field(g, 2.0, 9, 4);
    ChaosState a = initial_state(u0, s), b = initial_state(u0, s);
    integrate(s, a, 0.02, 1, 1);
    integrate(s, b, 0.02, 1, 3);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) CHECK(a.coeffs[i] == b.coeffs[i]);
  }

  TEST_CASE("integrate validates its span and stride") {
    const Grid g(16);
    const PropagatorSystem s(enumerate_indices(0, 1, 1), NoiseModel(g, 1), config(0.1, 0.01, 1.0));
    ChaosState st = initial_state(taylor_green(g), s);
    CHECK(code_of([&] { integrate(s, st, 0.015); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { integrate(s, st, 0.02, 0); }) == ErrorCode::InvalidArgument);
    const PropagatorRun run = integrate(s, st, 0.07, 3);
    REQUIRE(run.samples.size() == 4);
    CHECK(run.samples[1].step == 3);
    CHECK(run.samples[3].step == 7);
  }

  TEST_CASE("CFL policy") {
    const Grid g(16);
    const SpectralField fast = taylor_green(g, 50.0);
    const PropagatorSystem strict(enumerate_indices(0, 1, 1), NoiseModel(g, 1), config(0.1, 0.05, 1.0));
    ChaosState a = initial_state(fast, strict);
    CHECK(code_of([&] { integrate(strict, a, 0.1); }) == ErrorCode::CflViolation);
    PropagatorConfig lax = config(0.1, 0.05, 1.0);
    lax.cfl = CflPolicy::Warn;
    const PropagatorSystem warn(enumerate_indices(0, 1, 1), NoiseModel(g, 1), lax);
    ChaosState b = initial_state(fast, warn);
    const PropagatorRun run = integrate(warn, b, 0.1);
    CHECK(run.cfl_warnings == 2);
    CHECK(run.max_cfl > 1.0);
  }

  TEST_CASE("non-finite energy is a numerical failure") {
    const Grid g(16);
    const PropagatorSystem s(enumerate_indices(0, 1, 1), NoiseModel(g, 1), config(0.1, 0.01, 1.0));
    ChaosState st = initial_state(taylor_green(g), s);
    st.coeffs[0](0, 1, 1) = Complex(std::numeric_limits<double>::quiet_NaN());
    CHECK(code_of([&] {
            PropagatorConfig c = config(0.1, 0.01, 1.0);
            c.cfl = CflPolicy::Warn;
            const PropagatorSystem w(enumerate_indices(0, 1, 1), NoiseModel(g, 1), c);
            integrate(w, st, 0.02);
          }) == ErrorCode::NumericalFailure);
  }

  TEST_CASE("reconstruct") {
    const Grid g(16);
    const PropagatorSystem s(enumerate_indices(2, 1, 1), NoiseModel(g, 1), config(0.1, 0.01, 1.0));
    ChaosState st;
    for (std::uint64_t i = 0; i < 3; ++i) st.coeffs.push_back(random_divfree_field(g, 1.5, 40 + i));
    // index order: 0, e, 2e. At xi = 0: u_0 + He_2(0) u_2e / 2 = u_0 - u_2e / 2.
    const SpectralField at0 = reconstruct(st, s.index_set(), {{Slot{1, 1}, 0.0}});
    CHECK(l2_norm(at0 - (st.coeffs[0] - 0.5 * st.coeffs[2])) < 1e-14);
    const double x = 1.7;
    const SpectralField atx = reconstruct(st, s.index_set(), {{Slot{1, 1}, x}});
    const SpectralField expect = st.coeffs[0] + x * st.coeffs[1] + (0.5 * (x * x - 1.0)) * st.coeffs[2];
    CHECK(l2_norm(atx - expect) < 1e-13 * l2_norm(expect));
    CHECK(code_of([&] { (void)reconstruct(st, s.index_set(), {}); }) == ErrorCode::MissingCoordinate);
  }

  TEST_CASE("chaos second moment is the mean of the reconstruction energy") {
    const Grid g(8);
    const PropagatorSystem s(enumerate_indices(2, 1, 2), NoiseModel(g, 2), config(0.1, 0.01, 1.0));
    ChaosState st;
    for (std::size_t i = 0; i < s.index_set().size(); ++i)
      st.coeffs.push_back(random_divfree_field(g, 1.5, 60 + i));
    const QuadratureRule q = gauss_hermite_normal(4);
    double mean_energy = 0.0;
    for (std::size_t a = 0; a < q.nodes.size(); ++a)
      for (std::size_t b = 0; b < q.nodes.size(); ++b) {
        const double e = l2_norm(reconstruct(st, s.index_set(), {{Slot{1, 1}, q.nodes[a]}, {Slot{1, 2}, q.nodes[b]}}));
        mean_energy += q.weights[a] * q.weights[b] * e * e;
      }
    CHECK(mean_energy == doctest::Approx(second_moment(st, s.index_set())).epsilon(1e-12));
  }

  TEST_CASE("pressure gradients at Taylor-Green") {
    const Grid g(16);
    const SpectralField u = taylor_green(g);
    PressureContext ctx;
    ctx.diffusion = 0.1 * Matrix2::Identity();
    const PressureGradients p = recover_pressure_gradients(u, NoiseModel(g, 2), ctx);
    CHECK(p.grad_ptilde.size() == 2);
    CHECK(l2_norm(p.grad_p + advection(u, u)) < 1e-13);
    CHECK(l2_norm(leray_project(p.grad_p)) < 1e-13);
  }

  TEST_CASE("noise pressure absorbs the gradient part of g") {
    const Grid g(16);
    NoiseModel n(g, 1);
    SpectralField gk = random_gradient_field(g, 1.5, 71);
    n.set_g(0, gk);
    const PressureGradients p = recover_pressure_gradients(random_divfree_field(g, 1.5, 72), n, {});
    CHECK(l2_norm(p.grad_ptilde[0] - gk) < 1e-13 * l2_norm(gk));
  }
}
