#include "chaos_ns/invariant_suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>

#include <Eigen/Eigenvalues>

#include "chaos_ns/coupling.hpp"
#include "chaos_ns/errors.hpp"
#include "chaos_ns/hermite.hpp"
#include "chaos_ns/mc_solver.hpp"
#include "chaos_ns/multi_index.hpp"
#include "chaos_ns/noise_model.hpp"
#include "chaos_ns/propagator.hpp"
#include "chaos_ns/quadrature.hpp"
#include "chaos_ns/snapshot.hpp"
#include "chaos_ns/spectral_ops.hpp"
#include "chaos_ns/time_basis.hpp"

namespace chaos_ns {

namespace {

class Runner {
 public:
  explicit Runner(std::vector<InvariantResult>& out) : out_(out) {}

  void check(const char* module, const char* name, double tolerance, const std::function<double()>& fn) {
    InvariantResult r{module, name, false, 0.0, tolerance, {}};
    try {
      r.measured = fn();
      r.passed = r.measured <= tolerance;
    } catch (const std::exception& e) {
      r.measured = std::numeric_limits<double>::quiet_NaN();
      r.detail = e.what();
    }
    out_.push_back(std::move(r));
  }

 private:
  std::vector<InvariantResult>& out_;
};

double rel_diff(const SpectralField& a, const SpectralField& b) {
  const double scale = std::max(l2_norm(a), l2_norm(b));
  return scale == 0.0 ? 0.0 : l2_norm(a - b) / scale;
}

std::vector<SpectralField> random_fields(const Grid& g, int count, std::uint64_t seed, bool solenoidal) {
  std::vector<SpectralField> out;
  for (int i = 0; i < count; ++i) {
    const auto s = seed + static_cast<std::uint64_t>(i);
    SpectralField f = random_divfree_field(g, 1.5, s);
    if (!solenoidal) {
      f += random_gradient_field(g, 1.5, s ^ 0x9e3779b97f4a7c15ULL);
      f.set_divergence_free(false);
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<MultiIndex> all_indices(int max_order, int slots) {
  return enumerate_indices(max_order, 1, slots).indices();
}

void chaos_algebra(Runner& run) {
  run.check("chaos-algebra", "wick orthogonality", 1e-10, [] {
    const auto set = all_indices(4, 3);
    double worst = 0.0;
    for (const auto& a : set)
      for (const auto& b : set) {
        const double e = triple_expectation_oracle(a, b, MultiIndex{});
        const double norm = std::sqrt(static_cast<double>(a.factorial() * b.factorial()));
        worst = std::max(worst, std::abs(e / norm - (a == b ? 1.0 : 0.0)));
      }
    return worst;
  });

  run.check("chaos-algebra", "triple product identity", 1e-9, [] {
    const auto set = all_indices(4, 2);
    double worst = 0.0;
    for (const auto& a : set)
      for (const auto& b : set)
        for (const auto& c : set) {
          const double e = triple_expectation_oracle(a, b, c);
          const bool complete = is_complete(a, b, c);
          if (complete != (std::abs(e) > 0.5)) return std::numeric_limits<double>::infinity();
          const double expected =
              complete ? static_cast<double>(a.factorial() * b.factorial() * c.factorial()) *
                             boost::rational_cast<double>(phi(a, b, c))
                       : 0.0;
          worst = std::max(worst, std::abs(e - expected));
        }
    return worst;
  });

  run.check("chaos-algebra", "phi permutation invariance", 0.0, [] {
    const auto set = all_indices(3, 2);
    double mismatches = 0.0;
    for (const auto& a : set)
      for (const auto& b : set)
        for (const auto& c : set) {
          if (!is_complete(a, b, c)) continue;
          const Rational p = phi(a, b, c);
          if (phi(a, c, b) != p || phi(b, a, c) != p || phi(b, c, a) != p || phi(c, a, b) != p || phi(c, b, a) != p)
            mismatches += 1.0;
        }
    return mismatches;
  });

  run.check("chaos-algebra", "decrement exhaustion", 0.0, [] {
    double failures = 0.0;
    const IndexSet set = enumerate_indices(3, 2, 2);
    for (const auto& a : set.indices()) {
      for (const auto& e : a.entries()) {
        MultiIndex d = a;
        for (int r = 0; r < e.order; ++r) d = d.decrement(e.slot.time_mode, e.slot.noise_mode);
        if (d.at(e.slot) != 0) failures += 1.0;
        for (const auto& other : a.entries())
          if (other.slot != e.slot && d.at(other.slot) != other.order) failures += 1.0;
      }
    }
    return failures;
  });

  run.check("chaos-algebra", "index set cardinality", 0.0, [] {
    double failures = 0.0;
    for (int p = 0; p <= 3; ++p)
      for (int nt = 1; nt <= 3; ++nt)
        for (int nw = 1; nw <= 3; ++nw) {
          const Truncation tr{p, nt, nw};
          if (enumerate_indices(p, nt, nw).size() != index_set_cardinality(tr)) failures += 1.0;
        }
    return failures;
  });

  run.check("chaos-algebra", "coupling table symmetry", 0.0, [] {
    const IndexSet set = enumerate_indices(3, 2, 2);
    const CouplingTable table = build_coupling_table(set);
    double failures = 0.0;
    for (std::size_t a = 0; a < set.size(); ++a) {
      const auto& row = table.row(a);
      for (const auto& e : row) {
        if (e.weight <= 0) failures += 1.0;
        const bool mirrored = std::any_of(row.begin(), row.end(), [&](const CouplingEntry& o) {
          return o.beta == e.gamma && o.gamma == e.beta && o.weight == e.weight;
        });
        if (!mirrored) failures += 1.0;
      }
      std::size_t complete = 0;
      for (std::size_t b = 0; b < set.size(); ++b)
        for (std::size_t c = 0; c < set.size(); ++c)
          if (is_complete(set[a], set[b], set[c])) ++complete;
      if (complete != row.size()) failures += 1.0;
    }
    return failures;
  });
}

void spectral_field(Runner& run, std::uint64_t seed) {
  const Grid g(32);
  const auto mixed = random_fields(g, 20, seed, false);
  const auto solenoidal = random_fields(g, 20, seed + 1000, true);

  run.check("spectral-field", "transform roundtrip", 1e-12, [&] {
    double worst = 0.0;
    for (const auto& f : mixed) worst = std::max(worst, rel_diff(from_grid(to_grid(f)), f));
    return worst;
  });
  run.check("spectral-field", "projection idempotence", 1e-12, [&] {
    double worst = 0.0;
    for (const auto& f : mixed) {
      const SpectralField s = leray_project(f);
      worst = std::max(worst, l2_norm(leray_project(s) - s) / l2_norm(f));
    }
    return worst;
  });
  run.check("spectral-field", "potential idempotence", 1e-12, [&] {
    double worst = 0.0;
    for (const auto& f : mixed) {
      const SpectralField p = potential_project(f);
      worst = std::max(worst, l2_norm(potential_project(p) - p) / l2_norm(f));
    }
    return worst;
  });
  run.check("spectral-field", "projection complement", 1e-12, [&] {
    double worst = 0.0;
    for (const auto& f : mixed) worst = std::max(worst, rel_diff(leray_project(f) + potential_project(f), f));
    return worst;
  });
  run.check("spectral-field", "projection orthogonality", 1e-12, [&] {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < mixed.size(); ++i) {
      const auto& f = mixed[i];
      const auto& h = mixed[i + 1];
      worst = std::max(worst, std::abs(inner(potential_project(f), leray_project(h))) / (l2_norm(f) * l2_norm(h)));
    }
    return worst;
  });
  run.check("spectral-field", "leray divergence", 1e-12, [&] {
    double worst = 0.0;
    for (const auto& f : mixed) worst = std::max(worst, max_divergence(leray_project(f)) / l2_norm(f));
    return worst;
  });
  run.check("spectral-field", "convection skew symmetry", 1e-11, [&] {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < solenoidal.size(); ++i) {
      const auto& u = solenoidal[i];
      const auto& v = solenoidal[i + 1];
      const double h1 = h1_seminorm(v);
      const double scale = l2_norm(u) * (l2_norm(v) * l2_norm(v) + h1 * h1);
      worst = std::max(worst, std::abs(inner(convect(u, v), v)) / scale);
    }
    return worst;
  });
  run.check("spectral-field", "ladyzhenskaya inequality", 1e-10, [&] {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 200; ++i) {
      const SpectralField v = random_divfree_field(g, 1.0 + 0.01 * i, seed + 5000 + static_cast<std::uint64_t>(i));
      const FieldNorms n = norms(v);
      const double bound = std::pow(2.0, 0.25) * std::sqrt(n.l2 * n.h1_seminorm);
      worst = std::max(worst, n.l4 / bound - 1.0);
    }
    return worst;
  });
  run.check("spectral-field", "parseval consistency", 1e-12, [&] {
    double worst = 0.0;
    const double cell = g.length() * g.length() / static_cast<double>(g.physical_size());
    for (const auto& f : mixed) {
      const VectorSamples s = to_grid(f);
      double quad = 0.0;
      for (const auto& c : s.components)
        for (double x : c) quad += x * x * cell;
      const double l2 = l2_norm(f);
      worst = std::max(worst, std::abs(std::sqrt(quad) - l2) / l2);
    }
    return worst;
  });
  run.check("spectral-field", "hermitian symmetry", 1e-12, [&] {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < solenoidal.size(); ++i) {
      const auto& u = solenoidal[i];
      const double scale = l2_norm(u);
      worst = std::max({worst, hermitian_defect(convect(u, solenoidal[i + 1])) / scale,
                        hermitian_defect(leray_project(mixed[i])) / scale,
                        hermitian_defect(partial(mixed[i], 1)) / scale});
    }
    return worst;
  });
  run.check("spectral-field", "snapshot round trip", 0.0, [&] {
    double mismatches = 0.0;
    for (const auto& f : mixed) {
      const VectorSamples s = to_grid(f);
      const VectorSamples back = decode_snapshot(encode_snapshot(s), g.length());
      if (back.components != s.components) mismatches += 1.0;
    }
    return mismatches;
  });
}

NoiseModel reference_noise(const Grid& g, double c0) {
  KraichnanParams p;
  p.c0 = c0;
  p.kappa = 1.0;
  p.cutoff = 2;
  return NoiseModel::kraichnan(g, p);
}

void noise_model(Runner& run) {
  const Grid g(32);
  run.check("noise-model", "time basis orthonormality", 1e-12, [] {
    double worst = 0.0;
    const int nt = 8;
    const TimeBasis basis(0.7, nt);
    const QuadratureRule rule = gauss_legendre(2 * nt, 0.0, 0.7);
    for (int i = 1; i <= nt; ++i)
      for (int j = 1; j <= nt; ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
          s += rule.weights[q] * basis.value(i, rule.nodes[q]) * basis.value(j, rule.nodes[q]);
        worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
      }
    return worst;
  });
  const NoiseModel noise = reference_noise(g, 1.0);
  run.check("noise-model", "sigma divergence free", 1e-12, [&] {
    double worst = 0.0;
    for (const auto& s : noise.sigma_fields()) worst = std::max(worst, max_divergence(s));
    return worst;
  });
  run.check("noise-model", "sigma inside dealiased band", 0.0, [&] {
    double outside = 0.0;
    for (const auto& s : noise.sigma_fields()) outside += l2_norm(s - dealias(s));
    return outside;
  });
  run.check("noise-model", "ito homogeneity", 1e-10, [&] { return ito_inhomogeneity(noise.sigma_fields()); });
  run.check("noise-model", "ito correction psd", 1e-14, [&] {
    const Matrix2& c = noise.ito_correction();
    const double asym = std::abs(c(0, 1) - c(1, 0));
    const Eigen::SelfAdjointEigenSolver<Matrix2> es(c);
    return std::max(asym, -std::min(0.0, es.eigenvalues().minCoeff()));
  });
  run.check("noise-model", "wiener path covariance convergence", 0.0, [] {
    // Truncated covariance sum_i M_i(s) M_i(t) against min(s, t), n_t = 1, 4, 16.
    double previous = std::numeric_limits<double>::infinity();
    double violations = 0.0;
    for (int nt : {1, 4, 16}) {
      const TimeBasis basis(1.0, nt);
      double worst = 0.0;
      for (int a = 0; a <= 20; ++a)
        for (int b = 0; b <= 20; ++b) {
          const double s = a / 20.0, t = b / 20.0;
          double cov = 0.0;
          for (int i = 1; i <= nt; ++i) cov += basis.antiderivative(i, s) * basis.antiderivative(i, t);
          worst = std::max(worst, std::abs(cov - std::min(s, t)));
        }
      if (!(worst < previous)) violations += 1.0;
      previous = worst;
    }
    return violations;
  });
}

SpectralField low_mode_field(const Grid& g, std::uint64_t seed) { return random_divfree_field(g, 2.0, seed, 3); }

void propagator(Runner& run, std::uint64_t seed, int workers) {
  const Grid g(16);
  const NoiseModel noise = reference_noise(g, 0.2);

  run.check("propagator", "linearity without convection", 1e-12, [&] {
    PropagatorConfig c;
    c.nu = 0.1;
    c.dt = 0.01;
    c.horizon = 0.1;
    c.convection = false;
    NoiseModel n1 = noise, n2 = noise, n12 = noise;
    const SpectralField g1 = low_mode_field(g, seed + 1), g2 = low_mode_field(g, seed + 2);
    n1.set_g(0, g1);
    n2.set_g(0, g2);
    n12.set_g(0, g1 + 2.0 * g2);
    const SpectralField u1 = low_mode_field(g, seed + 3), u2 = low_mode_field(g, seed + 4);
    const auto final_state = [&](NoiseModel n, const SpectralField& u0) {
      IndexSet set = enumerate_indices(2, 1, n.noise_modes());
      PropagatorSystem sys(std::move(set), std::move(n), c, workers);
      ChaosState st = initial_state(u0, sys);
      integrate(sys, st, c.horizon, 5, workers);
      return st;
    };
    const ChaosState a = final_state(n1, u1), b = final_state(n2, u2), ab = final_state(n12, u1 + 2.0 * u2);
    double worst = 0.0;
    for (std::size_t i = 0; i < ab.coeffs.size(); ++i) {
      const SpectralField sum = a.coeffs[i] + 2.0 * b.coeffs[i];
      const double scale = std::max(l2_norm(ab.coeffs.front()), 1.0);
      worst = std::max(worst, l2_norm(sum - ab.coeffs[i]) / scale);
    }
    return worst;
  });

  PropagatorConfig c;
  c.nu = 0.1;
  c.dt = 0.005;
  c.horizon = 0.05;
  PropagatorSystem sys(enumerate_indices(2, 2, noise.noise_modes()), noise, c, workers);
  ChaosState st = initial_state(low_mode_field(g, seed + 7), sys);
  std::vector<double> energies{second_moment(st, sys.index_set())};
  double worst_div = 0.0, worst_var = 0.0;
  for (int s = 0; s < 10; ++s) {
    step(sys, st, workers);
    st.t += c.dt;
    energies.push_back(second_moment(st, sys.index_set()));
    worst_div = std::max(worst_div, max_coefficient_divergence(st));
    const double m = l2_norm(mean(st));
    worst_var = std::max(worst_var, m * m - energies.back());
  }
  run.check("propagator", "divergence preservation", 1e-10, [&] { return worst_div; });
  run.check("propagator", "variance nonnegativity", 1e-12, [&] { return worst_var; });
  run.check("propagator", "second moment decay", 1e-8, [&] {
    double worst = 0.0;
    for (std::size_t i = 1; i < energies.size(); ++i)
      worst = std::max(worst, (energies[i] - energies[i - 1]) / energies[0]);
    return worst;
  });

  run.check("propagator", "chaos convection neutrality", 1e-11, [&] {
    const IndexSet set = enumerate_indices(2, 1, 1);
    PropagatorConfig pc;
    pc.horizon = 1.0;
    PropagatorSystem s2(set, NoiseModel(g, 1), pc);
    std::vector<SpectralField> coeffs;
    for (std::size_t a = 0; a < set.size(); ++a) coeffs.push_back(low_mode_field(g, seed + 100 + a));
    double total = 0.0, scale = 0.0;
    for (std::size_t a = 0; a < set.size(); ++a) {
      const double w = 1.0 / static_cast<double>(set[a].factorial());
      const SpectralField n = s2.kernel().nonlinear_term(coeffs, a);
      total += w * inner(n, coeffs[a]);
      scale += w * l2_norm(n) * l2_norm(coeffs[a]);
    }
    return std::abs(total) / scale;
  });

  run.check("propagator", "taylor-green decay", 1e-6, [&] {
    const Grid g32(32);
    PropagatorConfig pc;
    pc.nu = 0.1;
    pc.dt = 1e-3;
    pc.horizon = 0.1;
    PropagatorSystem s0(enumerate_indices(0, 1, 1), NoiseModel(g32, 1), pc, workers);
    ChaosState s = initial_state(taylor_green(g32), s0);
    const double e0 = second_moment(s, s0.index_set());
    const PropagatorRun r = integrate(s0, s, 0.1, 100, workers);
    return std::abs(r.samples.back().mean_energy / (e0 * std::exp(-4.0 * 0.1 * 0.1)) - 1.0);
  });

  run.check("propagator", "taylor-green pressure", 1e-12, [&] {
    const Grid g32(32);
    const SpectralField u = taylor_green(g32);
    const PressureGradients p = recover_pressure_gradients(u, NoiseModel(g32, 1), {});
    VectorSamples expected(g32);
    for (int i = 0; i < g32.n(); ++i)
      for (int j = 0; j < g32.n(); ++j) {
        const std::size_t at = static_cast<std::size_t>(i * g32.n() + j);
        expected.components[0][at] = -0.5 * std::sin(2.0 * g32.coordinate(i));
        expected.components[1][at] = -0.5 * std::sin(2.0 * g32.coordinate(j));
      }
    return std::max(rel_diff(p.grad_p, from_grid(expected)), l2_norm(leray_project(p.grad_p)));
  });
}

void mc_solver(Runner& run, std::uint64_t seed, int workers) {
  const Grid g(16);
  const NoiseModel noise = reference_noise(g, 0.2);
  const SpectralField u0 = low_mode_field(g, seed + 11);

  run.check("mc-solver", "mollifier consistency", 0.0, [&] {
    McConfig base{noise};
    base.dt = 0.01;
    base.horizon = 0.01;
    McConfig wide = base;
    wide.mollifier_cutoff = g.dealias_limit();
    const McSolver a(base), b(wide);
    SpectralField ua = u0, ub = u0;
    const std::vector<double> dw(static_cast<std::size_t>(noise.noise_modes()), 0.05);
    a.step_path(ua, 0.0, dw);
    b.step_path(ub, 0.0, dw);
    return ua == ub ? 0.0 : 1.0;
  });

  run.check("mc-solver", "mollified convection neutrality", 1e-11, [&] {
    double worst = 0.0;
    const SpectralField u = leray_project(u0);
    for (int cutoff = 0; cutoff <= g.dealias_limit(); ++cutoff) {
      const SpectralField c = leray_project(advection(mollify(u, cutoff), u));
      const double h1 = h1_seminorm(u);
      worst = std::max(worst, std::abs(inner(c, u)) / (l2_norm(u) * (l2_norm(u) * l2_norm(u) + h1 * h1)));
    }
    return worst;
  });

  McConfig cfg{noise};
  cfg.nu = 0.1;
  cfg.dt = 0.005;
  cfg.horizon = 0.05;
  cfg.paths = 6;
  cfg.seed = seed;
  const McSolver solver(cfg);
  const EnsembleStats one = solver.run_ensemble(u0, 1);
  run.check("mc-solver", "transport energy monotonicity", 1e-8, [&] { return one.max_energy_increase; });
  run.check("mc-solver", "divergence preservation", 1e-10, [&] { return one.max_divergence; });
  run.check("mc-solver", "energy estimate", 1e-6, [&] {
    const double e0 = one.samples.front().mean_energy;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : one.samples) worst = std::max(worst, (s.mean_energy + 2.0 * cfg.nu * s.mean_dissipation) / e0 - 1.0);
    return worst;
  });
  run.check("mc-solver", "ensemble determinism", 0.0, [&] {
    const EnsembleStats many = solver.run_ensemble(u0, std::max(2, workers));
    double mismatches = 0.0;
    for (std::size_t s = 0; s < one.samples.size(); ++s) {
      if (one.samples[s].mean_energy != many.samples[s].mean_energy) mismatches += 1.0;
      if (one.samples[s].energy_se != many.samples[s].energy_se) mismatches += 1.0;
      if (!(one.mean_fields[s] == many.mean_fields[s])) mismatches += 1.0;
    }
    return mismatches;
  });
  run.check("mc-solver", "deterministic consistency", 0.0, [&] {
    McConfig quiet{NoiseModel(g, 2)};
    quiet.nu = 0.1;
    quiet.dt = 0.005;
    quiet.horizon = 0.05;
    const Trajectory tr = McSolver(quiet).simulate_path(u0, 0);
    PropagatorConfig pc;
    pc.nu = 0.1;
    pc.dt = 0.005;
    pc.horizon = 0.05;
    PropagatorSystem sys(enumerate_indices(0, 1, 2), NoiseModel(g, 2), pc, workers);
    ChaosState st = initial_state(u0, sys);
    integrate(sys, st, pc.horizon, 1, workers);
    return st.coeffs.front() == tr.fields.back() ? 0.0 : 1.0;
  });
}

}  // namespace

std::vector<InvariantResult> run_invariant_suite(const SuiteOptions& options) {
  std::vector<InvariantResult> results;
  Runner run(results);
  // Setup shared by several checks runs outside Runner::check; a throw there
  // is recorded as a failed pseudo-check for the module.
  const auto section = [&](const char* module, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      results.push_back({module, "module setup", false, std::numeric_limits<double>::quiet_NaN(), 0.0, e.what()});
    }
  };
  section("chaos-algebra", [&] { chaos_algebra(run); });
  section("spectral-field", [&] { spectral_field(run, options.seed); });
  section("noise-model", [&] { noise_model(run); });
  section("propagator", [&] { propagator(run, options.seed, options.workers); });
  section("mc-solver", [&] { mc_solver(run, options.seed, options.workers); });
  return results;
}

}  // namespace chaos_ns
