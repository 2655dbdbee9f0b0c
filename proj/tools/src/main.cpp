#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chaos_ns_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace chaos_ns::cli;
  CLI::App app{"Chaos propagator and Monte Carlo harness for stochastic Navier-Stokes on the 2-torus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CHAOS_NS_VERSION_STRING);

  CommandOptions options;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out = ".";

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    sub->add_option("--workers", workers, "worker threads (default: CHAOS_NS_WORKERS or hardware threads)")
        ->check(CLI::Range(1, 4096));
    if (!needs_config) return;
    sub->add_option("--config", config, "experiment config (JSON)")->required();
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "overrides mc.seed");
  };

  CLI::App* validate = app.add_subcommand("validate", "run the invariant suites of every module");
  add_common(validate, false);
  std::string fault;
  validate->add_option("--inject-fault", fault)->check(CLI::IsMember({"leray-sign"}))->group("");
  for (const auto& [name, help] : {std::pair{"propagate", "integrate the chaos propagator"},
                                   {"montecarlo", "run the Monte Carlo ensemble"},
                                   {"compare", "cross-validate propagator and Monte Carlo"},
                                   {"spectrum", "dump the Kraichnan spectrum and noise inventory"}})
    add_common(app.add_subcommand(name, help), true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  options.inject_leray_fault = fault == "leray-sign";
  options.config = config;
  options.out = out;
  options.seed = seed;
  options.workers = resolve_workers(workers);
  const std::string command = app.get_subcommands().front()->get_name();
  return run_command(command, options, std::cout, std::cerr);
}
