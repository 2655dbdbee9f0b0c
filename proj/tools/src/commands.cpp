#include "chaos_ns_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "chaos_ns/errors.hpp"
#include "chaos_ns/invariant_suite.hpp"
#include "chaos_ns/mc_solver.hpp"
#include "chaos_ns/multi_index.hpp"
#include "chaos_ns/propagator.hpp"
#include "chaos_ns/spectral_ops.hpp"
#include "chaos_ns_cli/config.hpp"
#include "chaos_ns_cli/io.hpp"
#include "chaos_ns_cli/oracles.hpp"

#ifndef CHAOS_NS_VERSION_STRING
#define CHAOS_NS_VERSION_STRING "0.0.0"
#endif

namespace chaos_ns::cli {

namespace {

using ordered = nlohmann::ordered_json;

constexpr double kValidateBudgetSeconds = 120.0;

namespace units {
constexpr const char* kStep = "step[1]";
constexpr const char* kTime = "t[T]";
}  // namespace units

std::string energy_column(const std::string& name) { return name + "[U^2*L^2]"; }

// Collects artifacts of one command and renders the run report.
class Report {
 public:
  Report(std::string command, const ExperimentConfig& config, std::filesystem::path out)
      : command_(std::move(command)), out_(std::move(out)), echo_(canonical_echo(config)) {}

  void write_csv(const std::string& name, const CsvTable& table) {
    write_artifact(name, table.text());
    series_.push_back({{"file", name}, {"rows", table.rows()}});
  }

  void write_artifact(const std::string& name, std::string_view bytes) {
    write_file(out_ / name, bytes);
    artifacts_.push_back({{"file", name}, {"hash", git_blob_hash(bytes)}});
  }

  void write_artifact(const std::string& name, std::span<const std::uint8_t> bytes) {
    write_artifact(name, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }

  void summary(const std::string& name, double value, const std::string& series, int step) {
    summary_[name] = {{"value", value}, {"series", series}, {"step", step}};
  }

  void verdict(const std::string& name, bool passed, double measured, double tolerance, const std::string& series) {
    verdicts_.push_back({{"name", name},
                         {"status", passed ? "PASS" : "FAIL"},
                         {"measured", measured},
                         {"tolerance", tolerance},
                         {"series", series}});
    all_passed_ = all_passed_ && passed;
  }

  [[nodiscard]] bool passed() const noexcept { return all_passed_; }

  // Writes <command>_report.json last so that every artifact hash is known.
  void finish(std::ostream& out) {
    ordered report;
    report["command"] = command_;
    report["artifact_version"] = CHAOS_NS_VERSION_STRING;
    report["config"] = ordered::parse(echo_);
    report["config_hash"] = git_blob_hash(echo_);
    std::string manifest = echo_;
    for (const auto& a : artifacts_) manifest += a["file"].get<std::string>() + ' ' + a["hash"].get<std::string>() + '\n';
    report["content_hash"] = git_blob_hash(manifest);
    report["artifacts"] = artifacts_;
    report["series"] = series_;
    report["summary"] = summary_;
    report["verdicts"] = verdicts_;
    report["status"] = verdicts_.empty() ? "NONE" : (all_passed_ ? "PASS" : "FAIL");
    const std::string name = command_ + "_report.json";
    write_file(out_ / name, report.dump(2) + "\n");
    out << "wrote " << (out_ / name).string() << " (status " << report["status"].get<std::string>() << ")\n";
    for (const auto& v : verdicts_)
      out << "  " << v["status"].get<std::string>() << "  " << v["name"].get<std::string>() << "\n";
  }

 private:
  std::string command_;
  std::filesystem::path out_;
  std::string echo_;
  ordered artifacts_ = ordered::array();
  ordered series_ = ordered::array();
  ordered summary_ = ordered::object();
  ordered verdicts_ = ordered::array();
  bool all_passed_ = true;
};

ExperimentConfig load(const CommandOptions& o) {
  if (o.config.empty()) throw ConfigError("--config", "a config file is required");
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.mc.seed = *o.seed;
  return c;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::NumericalFailure:
      case ErrorCode::CflViolation:
        return kExitNumerical;
      default:
        return kExitConfig;
    }
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

IndexSet index_set_for(const ExperimentConfig& c, int order) {
  return enumerate_indices(order, c.chaos.n_t, c.chaos.n_w);
}

struct ChaosRun {
  ChaosState state;
  PropagatorRun run;
  IndexSet set;
};

ChaosRun run_chaos(const ExperimentConfig& c, const Experiment& e, int order, int workers, std::ostream& err) {
  IndexSet set = index_set_for(c, order);
  const PropagatorSystem system(set, e.noise, propagator_config(c, e), workers);
  ChaosState state = initial_state(e.u0, system);
  PropagatorRun run = integrate(system, state, c.time.T, c.time.output_stride, workers);
  if (run.cfl_warnings > 0)
    err << "warning: advective CFL exceeded 1 on " << run.cfl_warnings << " steps (max " << run.max_cfl << ")\n";
  return {std::move(state), std::move(run), std::move(set)};
}

EnsembleStats run_mc(const ExperimentConfig& c, const Experiment& e, int workers, std::ostream& err) {
  const McSolver solver(mc_config(c, e));
  EnsembleStats stats = solver.run_ensemble(e.u0, workers);
  if (stats.cfl_warnings > 0)
    err << "warning: advective CFL exceeded 1 on " << stats.cfl_warnings << " steps (max " << stats.max_cfl << ")\n";
  return stats;
}

// Standard error of the ensemble mean field, from the pooled variance
// estimate M/(M-1) (E|u|^2 - |mean|^2).
double mean_field_se(double mean_energy, double mean_field_energy, int paths) {
  if (paths < 2) return 0.0;
  const double m = static_cast<double>(paths);
  const double var = std::max(mean_energy - mean_field_energy, 0.0) * m / (m - 1.0);
  return std::sqrt(var / m);
}

double squared_norm(const SpectralField& f) {
  const double n = l2_norm(f);
  return n * n;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

int resolve_workers(std::optional<int> flag) {
  if (flag && *flag >= 1) return *flag;
  if (const char* env = std::getenv("CHAOS_NS_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_validate(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    inject_leray_sign_fault(o.inject_leray_fault);
    const auto start = std::chrono::steady_clock::now();
    std::vector<InvariantResult> results;
    try {
      results = run_invariant_suite(SuiteOptions{o.workers, SuiteOptions{}.seed});
    } catch (...) {
      inject_leray_sign_fault(false);
      throw;
    }
    inject_leray_sign_fault(false);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ordered doc;
    ordered list = ordered::array();
    const InvariantResult* first_failure = nullptr;
    for (const auto& r : results) {
      ordered e;
      e["module"] = r.module;
      e["name"] = r.name;
      e["passed"] = r.passed;
      e["measured"] = std::isfinite(r.measured) ? ordered(r.measured) : ordered(nullptr);
      e["tolerance"] = r.tolerance;
      if (!r.detail.empty()) e["detail"] = r.detail;
      list.push_back(e);
      if (!r.passed && first_failure == nullptr) first_failure = &r;
    }
    doc["passed"] = first_failure == nullptr;
    doc["checks"] = results.size();
    doc["first_failure"] = first_failure ? ordered(first_failure->name) : ordered(nullptr);
    doc["results"] = list;
    out << doc.dump(2) << "\n";
    if (seconds > kValidateBudgetSeconds)
      err << "warning: invariant suite took " << seconds << " s (budget " << kValidateBudgetSeconds << " s)\n";
    if (first_failure) {
      err << "invariant failed: " << first_failure->name << " (" << first_failure->module << ")\n";
      return static_cast<int>(kExitInvariant);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_propagate(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = load(o);
    const Experiment e = build_experiment(c);
    ChaosRun chaos = run_chaos(c, e, c.chaos.P, o.workers, err);

    const bool tg = taylor_green_oracle_applies(c);
    const bool linear = linear_oracle_applies(c);
    std::vector<std::string> headers{units::kStep, units::kTime, energy_column("mean_energy"),
                                     energy_column("chaos_second_moment"), "max_divergence[U/L]"};
    if (tg) headers.push_back(energy_column("oracle_energy"));
    if (linear) {
      headers.push_back(energy_column("oracle_mean_energy"));
      headers.push_back(energy_column("oracle_variance"));
    }
    CsvTable table(headers);
    const double e0 = chaos.run.samples.front().mean_energy;
    std::optional<LinearReference> final_ref;
    for (const auto& s : chaos.run.samples) {
      std::vector<double> row{static_cast<double>(s.step), s.t, s.mean_energy, s.chaos_energy, s.max_divergence};
      if (tg) row.push_back(taylor_green_energy(c, e0, s.t));
      if (linear) {
        final_ref = linear_reference(e, c, s.t);
        row.push_back(final_ref->mean_energy);
        row.push_back(final_ref->variance);
      }
      table.add_row(row);
    }

    Report report("propagate", c, o.out);
    const std::string csv = "propagate_energy.csv";
    report.write_csv(csv, table);
    report.write_artifact("final_mean.snsf", snapshot_bytes(mean(chaos.state)));
    if (c.flags.alpha_snapshots) {
      CsvTable index({"position[1]", "order[1]", "factorial[1]"});
      for (std::size_t a = 0; a < chaos.set.size(); ++a) {
        char name[32];
        std::snprintf(name, sizeof name, "alpha/%05zu.snsf", a);
        report.write_artifact(name, snapshot_bytes(chaos.state.coeffs[a]));
        index.add_row({static_cast<double>(a), static_cast<double>(order(chaos.set[a])),
                       static_cast<double>(factorial(chaos.set[a]))});
      }
      report.write_csv("alpha/index.csv", index);
    }

    const PropagatorSample& last = chaos.run.samples.back();
    report.summary("final_mean_energy", last.mean_energy, csv + ":mean_energy", last.step);
    report.summary("chaos_second_moment", last.chaos_energy, csv + ":chaos_second_moment", last.step);
    if (tg) {
      const double ref = taylor_green_energy(c, e0, last.t);
      report.verdict("taylor-green energy decay", relative(last.mean_energy, ref) <= c.compare.oracle_rel_tol,
                     relative(last.mean_energy, ref), c.compare.oracle_rel_tol, csv + ":oracle_energy");
    }
    if (linear) {
      report.verdict("linear mean energy", relative(last.mean_energy, final_ref->mean_energy) <= c.compare.oracle_rel_tol,
                     relative(last.mean_energy, final_ref->mean_energy), c.compare.oracle_rel_tol,
                     csv + ":oracle_mean_energy");
      if (final_ref->variance > 0.0) {
        const double variance = last.chaos_energy - last.mean_energy;
        const double err_rel = relative(variance, final_ref->variance);
        report.verdict("linear variance (time-basis truncation)", err_rel <= c.compare.chaos_variance_rel_tol, err_rel,
                       c.compare.chaos_variance_rel_tol, csv + ":oracle_variance");
      }
    }
    report.finish(out);
    return static_cast<int>(report.passed() ? kExitOk : kExitInvariant);
  });
}

int cmd_montecarlo(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = load(o);
    const Experiment e = build_experiment(c);
    const EnsembleStats stats = run_mc(c, e, o.workers, err);

    const bool tg = taylor_green_oracle_applies(c);
    const bool linear = linear_oracle_applies(c);
    std::vector<std::string> headers{units::kStep,
                                     units::kTime,
                                     energy_column("mean_energy"),
                                     energy_column("energy_se"),
                                     "mean_dissipation[U^2*T]",
                                     energy_column("mean_field_energy")};
    if (tg) headers.push_back(energy_column("oracle_energy"));
    if (linear) {
      headers.push_back(energy_column("oracle_mean_energy"));
      headers.push_back(energy_column("oracle_variance"));
      headers.push_back(energy_column("variance_estimate"));
      headers.push_back(energy_column("variance_se"));
      headers.push_back("mean_field_error[U*L]");
      headers.push_back("mean_field_se[U*L]");
    }
    CsvTable table(headers);
    const double e0 = stats.samples.front().mean_energy;
    const double m = static_cast<double>(stats.paths);
    struct Final {
      double field_error = 0, field_se = 0, variance = 0, variance_se = 0;
      std::optional<LinearReference> ref;
    } fin;
    for (std::size_t i = 0; i < stats.samples.size(); ++i) {
      const auto& s = stats.samples[i];
      const double mfe = squared_norm(stats.mean_fields[i]);
      std::vector<double> row{static_cast<double>(s.step), s.t, s.mean_energy, s.energy_se, s.mean_dissipation, mfe};
      if (tg) row.push_back(taylor_green_energy(c, e0, s.t));
      if (linear) {
        fin.ref = linear_reference(e, c, s.t);
        fin.variance = stats.paths > 1 ? (s.mean_energy - mfe) * m / (m - 1.0) : 0.0;
        SpectralField diff = stats.mean_fields[i];
        diff -= fin.ref->mean;
        fin.field_error = l2_norm(diff);
        fin.field_se = mean_field_se(s.mean_energy, mfe, stats.paths);
        fin.variance_se = s.variance_se;
        row.insert(row.end(), {fin.ref->mean_energy, fin.ref->variance, fin.variance, fin.variance_se, fin.field_error,
                               fin.field_se});
      }
      table.add_row(row);
    }

    Report report("montecarlo", c, o.out);
    const std::string csv = "montecarlo_energy.csv";
    report.write_csv(csv, table);
    report.write_artifact("final_mean.snsf", snapshot_bytes(stats.mean_fields.back()));
    const EnsembleSample& last = stats.samples.back();
    report.summary("final_mean_energy", last.mean_energy, csv + ":mean_energy", last.step);
    report.summary("final_energy_se", last.energy_se, csv + ":energy_se", last.step);
    report.summary("final_mean_dissipation", last.mean_dissipation, csv + ":mean_dissipation", last.step);
    if (tg) {
      const double ref = taylor_green_energy(c, e0, last.t);
      const double tol = c.compare.oracle_rel_tol + c.compare.oracle_se_factor * last.energy_se / ref;
      report.verdict("taylor-green energy decay", relative(last.mean_energy, ref) <= tol,
                     relative(last.mean_energy, ref), tol, csv + ":oracle_energy");
    }
    if (linear) {
      const double floor = c.compare.oracle_rel_tol * std::sqrt(fin.ref->mean_energy);
      const double mean_tol = c.compare.mean_se_factor * fin.field_se + floor;
      report.verdict("linear mean field", fin.field_error <= mean_tol, fin.field_error, mean_tol,
                     csv + ":mean_field_error");
      if (fin.ref->variance > 0.0) {
        const double var_tol = c.compare.oracle_se_factor * fin.variance_se;
        const double gap = std::abs(fin.variance - fin.ref->variance);
        report.verdict("linear variance", gap <= var_tol, gap, var_tol, csv + ":variance_estimate");
      }
    }
    report.finish(out);
    return static_cast<int>(report.passed() ? kExitOk : kExitInvariant);
  });
}

int cmd_compare(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = load(o);
    const Experiment e = build_experiment(c);
    ChaosRun chaos = run_chaos(c, e, c.chaos.P, o.workers, err);
    const EnsembleStats stats = run_mc(c, e, o.workers, err);

    Report report("compare", c, o.out);
    CsvTable moments({units::kStep, units::kTime, energy_column("chaos_mean_energy"),
                      energy_column("chaos_second_moment"), energy_column("mc_mean_energy"),
                      energy_column("mc_energy_se"), energy_column("mc_mean_field_energy")});
    if (chaos.run.samples.size() != stats.samples.size())
      throw Error(ErrorCode::ShapeMismatch, "solvers produced different sample layouts");
    for (std::size_t i = 0; i < stats.samples.size(); ++i) {
      const auto& p = chaos.run.samples[i];
      const auto& s = stats.samples[i];
      moments.add_row({static_cast<double>(s.step), s.t, p.mean_energy, p.chaos_energy, s.mean_energy, s.energy_se,
                       squared_norm(stats.mean_fields[i])});
    }
    report.write_csv("compare_moments.csv", moments);

    const auto& p = chaos.run.samples.back();
    const auto& s = stats.samples.back();
    SpectralField diff = mean(chaos.state);
    diff -= stats.mean_fields.back();
    const double distance = l2_norm(diff);
    const double mfe = squared_norm(stats.mean_fields.back());
    const double field_se = mean_field_se(s.mean_energy, mfe, stats.paths);
    const double mean_tol = c.compare.mean_se_factor * field_se + c.compare.oracle_rel_tol * std::sqrt(mfe);
    const double gap = std::abs(p.chaos_energy - s.mean_energy);
    const double moment_tol = c.compare.moment_se_factor * s.energy_se + c.compare.moment_rel_margin * s.mean_energy;
    CsvTable fin({units::kStep, units::kTime, "mean_field_distance[U*L]", "mc_mean_field_se[U*L]",
                  "mean_tolerance[U*L]", energy_column("second_moment_discrepancy"),
                  energy_column("second_moment_tolerance")});
    fin.add_row({static_cast<double>(s.step), s.t, distance, field_se, mean_tol, gap, moment_tol});
    report.write_csv("compare_final.csv", fin);
    report.summary("chaos_second_moment", p.chaos_energy, "compare_moments.csv:chaos_second_moment", s.step);
    report.summary("mc_second_moment", s.mean_energy, "compare_moments.csv:mc_mean_energy", s.step);
    report.summary("mc_second_moment_se", s.energy_se, "compare_moments.csv:mc_energy_se", s.step);
    report.verdict("mean agreement", distance <= mean_tol, distance, mean_tol, "compare_final.csv:mean_field_distance");
    report.verdict("second-moment agreement", gap <= moment_tol, gap, moment_tol,
                   "compare_final.csv:second_moment_discrepancy");

    std::vector<int> orders = c.compare.pathwise_orders;
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    if (!orders.empty()) {
      const int nt = c.chaos.n_t, nw = c.chaos.n_w;
      const TimeBasis basis(c.time.T, nt);
      McConfig driven_cfg = mc_config(c, e);
      driven_cfg.paths = 1;
      const McSolver solver(std::move(driven_cfg));
      std::vector<ChaosCoordinates> xis;
      std::vector<SpectralField> targets;
      for (int k = 0; k < c.compare.xi_samples; ++k) {
        CounterRng rng(c.compare.xi_seed, static_cast<std::uint64_t>(k));
        xis.push_back(sample_coordinates(nt, nw, rng));
        const ChaosCoordinates& xi = xis.back();
        Trajectory tr = solver.simulate_driven(e.u0, [&](double t) {
          return path_from_chaos(xi, basis, nw, std::min(t, basis.horizon()));
        });
        targets.push_back(std::move(tr.fields.back()));
      }
      CsvTable errors({"P[1]", "sample[1]", "relative_error[1]"});
      CsvTable medians({"P[1]", "median_relative_error[1]"});
      std::vector<double> med;
      for (int order : orders) {
        const ChaosRun run = order == c.chaos.P ? ChaosRun{chaos.state, chaos.run, chaos.set}
                                                : run_chaos(c, e, order, o.workers, err);
        std::vector<double> rel;
        for (std::size_t k = 0; k < xis.size(); ++k) {
          SpectralField d = reconstruct(run.state, run.set, xis[k]);
          d -= targets[k];
          rel.push_back(l2_norm(d) / std::max(l2_norm(targets[k]), 1e-300));
          errors.add_row({static_cast<double>(order), static_cast<double>(k), rel.back()});
        }
        med.push_back(median(rel));
        medians.add_row({static_cast<double>(order), med.back()});
        report.summary("pathwise_median_P" + std::to_string(order), med.back(),
                       "compare_pathwise_median.csv:median_relative_error", c.compare.xi_samples);
      }
      report.write_csv("compare_pathwise.csv", errors);
      report.write_csv("compare_pathwise_median.csv", medians);
      if (med.size() >= 2) {
        double worst_ratio = 0.0;
        for (std::size_t i = 1; i < med.size(); ++i) worst_ratio = std::max(worst_ratio, med[i] / med[i - 1]);
        report.verdict("pathwise median strictly decreasing in P", worst_ratio < 1.0, worst_ratio, 1.0,
                       "compare_pathwise_median.csv:median_relative_error");
      }
    }
    report.finish(out);
    return static_cast<int>(report.passed() ? kExitOk : kExitInvariant);
  });
}

int cmd_spectrum(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = load(o);
    if (!(c.physics.C0 > 0.0)) throw ConfigError("physics.C0", "the spectrum command needs C0 > 0");
    const Experiment e = build_experiment(c);
    Report report("spectrum", c, o.out);

    CsvTable table({"z[1/L]", "trace[U^2*L^2]"});
    const int radius_steps = 4 * std::max(c.physics.K_noise, c.grid.n / 3);
    for (int j = 1; j <= radius_steps; ++j) {
      const double r = 0.25 * j;
      table.add_row({r, spectrum_tensor({r, 0.0}, c.physics.C0, c.physics.kappa).trace()});
    }
    report.write_csv("spectrum.csv", table);

    CsvTable modes({"mode[1]", "k1[1]", "k2[1]", "phase[1]", "amplitude[U]"});
    for (std::size_t i = 0; i < e.noise.modes().size(); ++i) {
      const auto& m = e.noise.modes()[i];
      modes.add_row({static_cast<double>(i + 1), static_cast<double>(m.wave[0]), static_cast<double>(m.wave[1]),
                     m.phase == Phase::Cosine ? 0.0 : 1.0, m.amplitude});
    }
    report.write_csv("spectrum_modes.csv", modes);

    // Covariance at the origin, sum_k sigma_k(0) sigma_k(0)^T, from grid samples.
    Matrix2 origin = Matrix2::Zero();
    for (const auto& s : e.noise.sigma_fields()) {
      const VectorSamples v = to_grid(s);
      const Eigen::Vector2d x(v.components[0][0], v.components[1][0]);
      origin += x * x.transpose();
    }
    const Matrix2& ito = e.noise.ito_correction();
    const double asym = std::abs(ito(0, 1) - ito(1, 0));
    const Eigen::SelfAdjointEigenSolver<Matrix2> eig(0.5 * (ito + ito.transpose()));
    const double min_eig = eig.eigenvalues().minCoeff();
    const double scale = std::max(ito.cwiseAbs().maxCoeff(), 1e-300);
    const bool symmetric = asym <= 1e-14 * scale;
    const bool psd = min_eig >= -1e-14 * scale;
    const auto matrix = [](const Matrix2& a) {
      return ordered::array({ordered::array({a(0, 0), a(0, 1)}), ordered::array({a(1, 0), a(1, 1)})});
    };
    const int expected = 2 * kraichnan_representatives(c.physics.K_noise);
    ordered doc;
    doc["c0"] = c.physics.C0;
    doc["kappa"] = c.physics.kappa;
    doc["K_noise"] = c.physics.K_noise;
    doc["mode_count"] = e.noise.noise_modes();
    doc["expected_mode_count"] = expected;
    doc["ito_correction"] = matrix(ito);
    doc["covariance_at_origin"] = matrix(origin);
    doc["ito_eigenvalues"] = {eig.eigenvalues()(0), eig.eigenvalues()(1)};
    doc["symmetric"] = symmetric;
    doc["psd"] = psd;
    doc["verdict"] = symmetric && psd && e.noise.noise_modes() == expected ? "PASS" : "FAIL";
    report.write_artifact("spectrum.json", doc.dump(2) + "\n");
    report.verdict("ito correction symmetric", symmetric, asym, 1e-14 * scale, "spectrum.json:ito_correction");
    report.verdict("ito correction positive semidefinite", psd, min_eig, -1e-14 * scale,
                   "spectrum.json:ito_eigenvalues");
    report.verdict("mode count", e.noise.noise_modes() == expected, e.noise.noise_modes(), expected,
                   "spectrum_modes.csv:mode");
    report.finish(out);
    return static_cast<int>(report.passed() ? kExitOk : kExitInvariant);
  });
}

int run_command(const std::string& name, const CommandOptions& o, std::ostream& out, std::ostream& err) {
  if (name == "validate") return cmd_validate(o, out, err);
  if (name == "propagate") return cmd_propagate(o, out, err);
  if (name == "montecarlo") return cmd_montecarlo(o, out, err);
  if (name == "compare") return cmd_compare(o, out, err);
  if (name == "spectrum") return cmd_spectrum(o, out, err);
  err << "unknown command: " << name << "\n";
  return kExitConfig;
}

}  // namespace chaos_ns::cli
