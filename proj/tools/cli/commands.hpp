#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace fsplay::cli {

struct CommandContext {
  Config config;
  std::filesystem::path out_dir = ".";
  bool plot = false;
  std::uint64_t seed = 1;
  std::ostream* log = nullptr;  ///< progress and warnings; may be null
};

struct CommandResult {
  std::vector<std::filesystem::path> files;
  /// Nonzero when the command ran but found violations (play-check).
  int status = 0;
};

CommandResult cmd_simulate(const CommandContext& ctx);
CommandResult cmd_limit(const CommandContext& ctx);
CommandResult cmd_converge(const CommandContext& ctx);
CommandResult cmd_bifurcate(const CommandContext& ctx);
CommandResult cmd_patched(const CommandContext& ctx);
/// Seeded random play-operator property suite.
CommandResult cmd_play_check(const CommandContext& ctx, std::size_t cases = 100);

/// Dispatches by command name; throws ConfigError for unknown names.
CommandResult run_command(const std::string& name, const CommandContext& ctx);

[[nodiscard]] const std::vector<std::string>& command_names();

}  // namespace fsplay::cli
