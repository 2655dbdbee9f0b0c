#pragma once

// Experiment configuration: JSON load with field-precise validation and a
// canonical echo (fixed key order, every field present).

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chaos_ns/drift_kernel.hpp"
#include "chaos_ns/mc_solver.hpp"
#include "chaos_ns/noise_model.hpp"
#include "chaos_ns/propagator.hpp"

namespace chaos_ns::cli {

/// `field` is a dotted path such as "physics.nu" or "forcing.g[0].noise_mode".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ModeSpec {
  std::array<int, 2> k{1, 0};
  std::array<double, 2> amplitude{0.0, 0.0};
  Phase phase = Phase::Cosine;
};

struct FieldSpec {
  enum class Kind { Zero, TaylorGreen, Modes, File };
  Kind kind = Kind::Zero;
  double amplitude = 1.0;        // taylor-green
  std::vector<ModeSpec> modes;   // modes
  std::string path;              // file, relative to the config file
};

struct GSpec {
  int noise_mode = 1;
  FieldSpec field;
};

struct HSpec {
  int component = 1;
  int noise_mode = 1;
  FieldSpec field;
};

struct ExperimentConfig {
  struct Grid {
    int n = 32;
    double length = 6.283185307179586;
  } grid;
  struct Physics {
    double nu = 0.1;
    std::array<double, 2> b{0.0, 0.0};
    double C0 = 0.0;  // 0 disables the Kraichnan transport noise
    double kappa = 1.0;
    int K_noise = 1;
  } physics;
  struct Chaos {
    int P = 1;
    int n_t = 1;
    int n_w = 1;
  } chaos;
  struct Mc {
    int M = 100;
    std::uint64_t seed = 1;
  } mc;
  struct Time {
    double dt = 1e-3;
    double T = 0.1;
    int output_stride = 1;
  } time;
  struct Forcing {
    FieldSpec u0{FieldSpec::Kind::TaylorGreen, 1.0, {}, {}};
    FieldSpec f;
    std::array<FieldSpec, 2> f_div;
    std::vector<GSpec> g;
    std::vector<HSpec> h;
  } forcing;
  struct Flags {
    HgCoupling h_g_coupling_variant = HgCoupling::MeanOnly;
    int mollifier_cutoff = -1;
    CflPolicy cfl_policy = CflPolicy::Error;
    bool convection = true;
    bool alpha_snapshots = false;
  } flags;
  struct Compare {
    int xi_samples = 20;
    std::uint64_t xi_seed = 99;
    std::vector<int> pathwise_orders{1, 2, 3};
    double mean_se_factor = 4.0;
    double moment_se_factor = 3.0;
    double moment_rel_margin = 0.05;
    double oracle_rel_tol = 1e-6;
    double oracle_se_factor = 3.0;
    double chaos_variance_rel_tol = 0.02;
  } compare;

  std::filesystem::path base_dir;  // not echoed; resolves file specs
};

/// Parses and validates. `source` names the input in error messages.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON (2-space indent, trailing newline).
std::string canonical_echo(const ExperimentConfig& config);

/// Runtime objects built from a validated config.
struct Experiment {
  chaos_ns::Grid grid;
  NoiseModel noise;
  SpectralField u0;
  Forcing forcing;
};

Experiment build_experiment(const ExperimentConfig& config);

PropagatorConfig propagator_config(const ExperimentConfig& config, const Experiment& experiment);
McConfig mc_config(const ExperimentConfig& config, const Experiment& experiment);

}  // namespace chaos_ns::cli
