#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chaos_ns/spectral_ops.hpp"
#include "chaos_ns_cli/commands.hpp"
#include "chaos_ns_cli/config.hpp"
#include "chaos_ns_cli/io.hpp"
#include "chaos_ns_cli/oracles.hpp"

using namespace chaos_ns;
using namespace chaos_ns::cli;
namespace fs = std::filesystem;

namespace {

const char* const kTaylorGreen = R"({
  "grid": {"n": 16},
  "physics": {"nu": 0.1},
  "chaos": {"P": 0, "n_t": 1, "n_w": 1},
  "mc": {"M": 1, "seed": 7},
  "time": {"dt": 0.01, "T": 0.1, "output_stride": 5},
  "forcing": {"u0": {"kind": "taylor-green", "amplitude": 1.0}}
})";

const char* const kKraichnan = R"({
  "grid": {"n": 8},
  "physics": {"nu": 0.05, "C0": 0.5, "kappa": 1.0, "K_noise": 1},
  "chaos": {"P": 1, "n_t": 1, "n_w": 8},
  "mc": {"M": 40, "seed": 3},
  "time": {"dt": 0.01, "T": 0.05, "output_stride": 1},
  "forcing": {"u0": {"kind": "modes", "modes": [{"k": [1, 1], "amplitude": [1.0, -1.0], "phase": "sin"}]}}
})";

std::string field_of(std::string_view text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("chaos_ns_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

fs::path write_config(const fs::path& dir, std::string_view text, const std::string& name = "config.json") {
  write_file(dir / name, text);
  return dir / name;
}

std::string patched(std::string_view base, const nlohmann::json& patch) {
  nlohmann::json j = nlohmann::json::parse(base);
  j.merge_patch(patch);
  return j.dump();
}

int run(const std::string& cmd, const fs::path& config, const fs::path& out, int workers = 1) {
  std::ostringstream o, e;
  CommandOptions opts;
  opts.config = config;
  opts.out = out;
  opts.workers = workers;
  return run_command(cmd, opts, o, e);
}

std::vector<std::uint8_t> bytes(const fs::path& p) { return read_file(p); }

}  // namespace

TEST_SUITE("harness-cli") {
  TEST_CASE("defaults and echo round trip") {
    const ExperimentConfig c = parse_config(kTaylorGreen);
    CHECK(c.grid.n == 16);
    CHECK(c.chaos.P == 0);
    CHECK(c.flags.h_g_coupling_variant == HgCoupling::MeanOnly);
    CHECK(c.flags.cfl_policy == CflPolicy::Error);
    const std::string echo = canonical_echo(c);
    CHECK(echo.back() == '\n');
    CHECK(canonical_echo(parse_config(echo)) == echo);
    const ExperimentConfig k = parse_config(kKraichnan);
    CHECK(canonical_echo(parse_config(canonical_echo(k))) == canonical_echo(k));
  }

  TEST_CASE("echo lists every section") {
    const nlohmann::json j = nlohmann::json::parse(canonical_echo(parse_config(kTaylorGreen)));
    for (const char* key : {"grid", "physics", "chaos", "mc", "time", "forcing", "flags", "compare"})
      CHECK(j.contains(key));
    CHECK(j["flags"]["h_g_coupling_variant"] == "mean-only");
  }

  TEST_CASE("validation names the offending field") {
    CHECK(field_of(patched(kTaylorGreen, {{"physics", {{"nuu", 1.0}}}})) == "physics.nuu");
    CHECK(field_of(patched(kTaylorGreen, {{"physics", {{"nu", 0.0}}}})) == "physics.nu");
    CHECK(field_of(patched(kTaylorGreen, {{"grid", {{"n", 12}}}})) == "grid.n");
    CHECK(field_of(patched(kTaylorGreen, {{"time", {{"T", 0.105}}}})) == "time.T");
    CHECK(field_of(patched(kTaylorGreen, {{"physics", {{"kappa", 2.0}}}})) == "physics.kappa");
    CHECK(field_of(patched(kTaylorGreen, {{"mc", {{"M", 0}}}})) == "mc.M");
    CHECK(field_of(patched(kKraichnan, {{"chaos", {{"n_w", 4}}}})) == "chaos.n_w");
    CHECK(field_of(patched(kKraichnan, {{"physics", {{"K_noise", 3}}}})) == "physics.K_noise");
    CHECK(field_of(patched(kTaylorGreen, {{"flags", {{"cfl_policy", "maybe"}}}})) == "flags.cfl_policy");
    CHECK(field_of(patched(kTaylorGreen, {{"forcing", {{"g", {{{"noise_mode", 2}, {"field", {{"kind", "zero"}}}}}}}}})) ==
          "forcing.g[0].noise_mode");
    CHECK(field_of(patched(kTaylorGreen,
                           {{"forcing", {{"u0", {{"kind", "modes"}, {"amplitude", nullptr}, {"modes", {{{"k", {0, 0}}, {"amplitude", {1, 0}}}}}}}}}})) ==
          "forcing.u0.modes[0].k");
    CHECK(field_of(patched(kTaylorGreen, {{"compare", {{"mean_se_factor", -1.0}}}})) == "compare.mean_se_factor");
  }

  TEST_CASE("syntax errors carry line and column") {
    try {
      (void)parse_config("{\n  \"grid\": {\"n\": 16},\n  oops\n}");
      FAIL("accepted malformed JSON");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
      CHECK(std::string(e.what()).find("column") != std::string::npos);
    }
  }

  TEST_CASE("experiment construction") {
    const ExperimentConfig c = parse_config(kKraichnan);
    const Experiment e = build_experiment(c);
    CHECK(e.noise.noise_modes() == 8);
    CHECK(e.noise.has_transport());
    CHECK(max_divergence(e.u0) < 1e-14);
    const PropagatorConfig pc = propagator_config(c, e);
    CHECK(pc.nu == 0.05);
    CHECK(pc.horizon == 0.05);
    const McConfig mc = mc_config(c, e);
    CHECK(mc.paths == 40);
    CHECK(mc.seed == 3);
  }

  TEST_CASE("file fields resolve relative to the config") {
    TempDir dir;
    const Grid g(16);
    write_file(dir.path() / "u0.snsf", snapshot_bytes(random_divfree_field(g, 1.5, 4)));
    const fs::path cfg = write_config(dir.path(), patched(kTaylorGreen, {{"forcing", {{"u0", {{"kind", "file"}, {"amplitude", nullptr}, {"path", "u0.snsf"}}}}}}));
    const ExperimentConfig c = load_config(cfg);
    const Experiment e = build_experiment(c);
    CHECK(l2_norm(e.u0 - random_divfree_field(g, 1.5, 4)) < 1e-13);
    const fs::path wrong = write_config(dir.path(), patched(kTaylorGreen, {{"grid", {{"n", 32}}}, {"forcing", {{"u0", {{"kind", "file"}, {"amplitude", nullptr}, {"path", "u0.snsf"}}}}}}), "wrong.json");
    CHECK_THROWS_AS((void)build_experiment(load_config(wrong)), ConfigError);
  }

  TEST_CASE("CSV formatting") {
    CsvTable t({"step[1]", "t[T]"});
    t.add_row({1.0, 0.1});
    t.add_row({2.0, 1e-20});
    CHECK(t.rows() == 2);
    CHECK(t.text() == "step[1],t[T]\n1,0.10000000000000001\n2,9.9999999999999995e-21\n");
    CHECK_THROWS((t.add_row({1.0})));
    CHECK(format_double(3.0) == "3");
    CHECK(format_double(-0.5) == "-0.5");
    CHECK(std::stod(format_double(M_PI)) == M_PI);
  }

  TEST_CASE("git blob hashes") {
    CHECK(git_blob_hash(std::string_view{}) == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_hash(std::string_view{"hello\n"}) == "ce013625030ba8dba906f756967f9e9ca394464a");
  }

  TEST_CASE("file writes round trip") {
    TempDir dir;
    const fs::path p = dir.path() / "nested" / "x.bin";
    const std::vector<std::uint8_t> data{0, 1, 2, 255};
    write_file(p, data);
    CHECK(read_file(p) == data);
    CHECK_THROWS((void)read_file(dir.path() / "missing.bin"));
  }

  TEST_CASE("Taylor-Green oracle") {
    const ExperimentConfig c = parse_config(kTaylorGreen);
    CHECK(taylor_green_oracle_applies(c));
    CHECK(taylor_green_energy(c, 2.0, 0.5) == doctest::Approx(2.0 * std::exp(-0.2)));
    CHECK_FALSE(taylor_green_oracle_applies(parse_config(kKraichnan)));
    CHECK_FALSE(linear_oracle_applies(parse_config(kTaylorGreen)));
  }

  TEST_CASE("worker resolution") {
    CHECK(resolve_workers(3) == 3);
    ::setenv("CHAOS_NS_WORKERS", "5", 1);
    CHECK(resolve_workers(std::nullopt) == 5);
    ::unsetenv("CHAOS_NS_WORKERS");
    CHECK(resolve_workers(std::nullopt) >= 1);
  }

  TEST_CASE("exit codes") {
    TempDir dir;
    CHECK(run("propagate", dir.path() / "missing.json", dir.path()) == kExitConfig);
    CHECK(run("frobnicate", write_config(dir.path(), kTaylorGreen), dir.path()) == kExitConfig);
    CHECK(run("propagate", write_config(dir.path(), "{\"grid\": {\"n\": 10}}", "bad.json"), dir.path()) == kExitConfig);
    const fs::path cfl = write_config(dir.path(), patched(kTaylorGreen, {{"forcing", {{"u0", {{"amplitude", 500.0}}}}}}), "cfl.json");
    CHECK(run("propagate", cfl, dir.path() / "cfl") == kExitNumerical);
    CHECK(run("spectrum", write_config(dir.path(), kTaylorGreen), dir.path() / "spec") == kExitConfig);
  }

  TEST_CASE("a failing verdict exits 1") {
    TempDir dir;
    const char* linear = R"({
      "grid": {"n": 8},
      "physics": {"nu": 0.2},
      "chaos": {"P": 1, "n_t": 1, "n_w": 1},
      "mc": {"M": 1, "seed": 1},
      "time": {"dt": 0.01, "T": 0.5, "output_stride": 50},
      "forcing": {"u0": {"kind": "zero"},
                  "g": [{"noise_mode": 1, "field": {"kind": "modes", "modes": [{"k": [1, 0], "amplitude": [0, 0.5], "phase": "cos"}]}}]},
      "flags": {"convection": false},
      "compare": {"chaos_variance_rel_tol": 0.0}
    })";
    // one time mode cannot carry the full Ornstein-Uhlenbeck variance
    CHECK(run("propagate", write_config(dir.path(), linear), dir.path()) == kExitInvariant);
    const nlohmann::json report = nlohmann::json::parse(read_file(dir.path() / "propagate_report.json"));
    CHECK(report["status"] == "FAIL");
  }

  TEST_CASE("propagate artifacts and report") {
    TempDir dir;
    REQUIRE(run("propagate", write_config(dir.path(), kTaylorGreen), dir.path()) == kExitOk);
    for (const char* f : {"propagate_energy.csv", "final_mean.snsf", "propagate_report.json"})
      CHECK(fs::exists(dir.path() / f));
    const nlohmann::json r = nlohmann::json::parse(read_file(dir.path() / "propagate_report.json"));
    CHECK(r["status"] == "PASS");
    CHECK(r["config_hash"].get<std::string>().size() == 40);
    const auto csv = bytes(dir.path() / "final_mean.snsf");
    bool listed = false;
    for (const auto& a : r["artifacts"])
      if (a.dump().find(git_blob_hash(csv)) != std::string::npos) listed = true;
    CHECK(listed);
    std::ifstream in(dir.path() / "propagate_energy.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("step[1],t[T],", 0) == 0);
  }

  TEST_CASE("reruns and worker counts give identical bytes") {
    TempDir dir;
    const fs::path cfg = write_config(dir.path(), kKraichnan);
    REQUIRE(run("montecarlo", cfg, dir.path() / "a", 1) == kExitOk);
    REQUIRE(run("montecarlo", cfg, dir.path() / "b", 1) == kExitOk);
    REQUIRE(run("montecarlo", cfg, dir.path() / "c", 2) == kExitOk);
    REQUIRE(run("propagate", cfg, dir.path() / "p1", 1) == kExitOk);
    REQUIRE(run("propagate", cfg, dir.path() / "p2", 2) == kExitOk);
    for (const char* f : {"montecarlo_energy.csv", "final_mean.snsf", "montecarlo_report.json"}) {
      CHECK(bytes(dir.path() / "a" / f) == bytes(dir.path() / "b" / f));
      CHECK(bytes(dir.path() / "a" / f) == bytes(dir.path() / "c" / f));
    }
    for (const char* f : {"propagate_energy.csv", "final_mean.snsf", "propagate_report.json"})
      CHECK(bytes(dir.path() / "p1" / f) == bytes(dir.path() / "p2" / f));
  }

  TEST_CASE("zero noise: propagate and montecarlo write the same mean field") {
    TempDir dir;
    const fs::path cfg = write_config(dir.path(), kTaylorGreen);
    REQUIRE(run("propagate", cfg, dir.path() / "p") == kExitOk);
    REQUIRE(run("montecarlo", cfg, dir.path() / "m") == kExitOk);
    CHECK(bytes(dir.path() / "p" / "final_mean.snsf") == bytes(dir.path() / "m" / "final_mean.snsf"));
  }

  TEST_CASE("spectrum report") {
    TempDir dir;
    REQUIRE(run("spectrum", write_config(dir.path(), kKraichnan), dir.path()) == kExitOk);
    const nlohmann::json s = nlohmann::json::parse(read_file(dir.path() / "spectrum.json"));
    CHECK(s["symmetric"] == true);
    CHECK(s["psd"] == true);
  }
}
