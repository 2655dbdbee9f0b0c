#pragma once

// Subcommands of the chaos_ns executable. Each returns a process exit code:
// 0 success, 1 invariant or verdict failure, 2 configuration error,
// 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace chaos_ns::cli {

enum ExitCode : int { kExitOk = 0, kExitInvariant = 1, kExitConfig = 2, kExitNumerical = 3 };

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  int workers = 1;
  std::optional<std::uint64_t> seed;  // overrides mc.seed
  bool inject_leray_fault = false;    // validate only: mutation fixture
};

int cmd_validate(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_propagate(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_montecarlo(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_compare(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_spectrum(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Dispatches by subcommand name; unknown names are configuration errors.
int run_command(const std::string& name, const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Worker count from --workers, else CHAOS_NS_WORKERS, else hardware threads.
int resolve_workers(std::optional<int> flag);

}  // namespace chaos_ns::cli
