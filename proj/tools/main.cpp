#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "fsplay/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kConfigFailure = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace fsplay::cli;

  CLI::App app{"Fast-slow systems with a play-operator singular limit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> preset;
  std::optional<std::string> out_dir;
  bool plot = false;
  std::uint64_t seed = 20240611;
  app.add_option("-c,--config", config_path, "INI configuration file");
  app.add_option("-p,--preset", preset, "named parameter set, e.g. netushil-oscillator");
  app.add_option("-o,--out", out_dir, "output directory (overrides output.dir)");
  app.add_flag("--plot", plot, "also write SVG figures");
  app.add_option("--seed", seed, "seed for play-check");

  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "integrate the epsilon-system; writes simulate.csv"},
      {"limit", "solve the singular-limit system; writes limit.csv"},
      {"converge", "epsilon sweep against the limit; writes converge.csv"},
      {"bifurcate", "attractor extent over a grid of c; writes bifurcate.csv"},
      {"patched", "piecewise-linearized solution and bound checks"},
      {"play-check", "randomized play-operator property checks"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    CommandContext ctx;
    if (!config_path.empty()) {
      ctx.config = load_config(config_path, preset);
    } else if (preset) {
      ctx.config = preset_config(*preset);
    } else if (command != "play-check") {
      throw ConfigError("either --config or --preset is required");
    }
    ctx.out_dir = out_dir ? *out_dir : ctx.config.output.dir;
    ctx.plot = plot || ctx.config.output.plot;
    ctx.seed = seed;
    ctx.log = &std::cerr;

    const CommandResult res = run_command(command, ctx);
    for (const auto& f : res.files) std::cout << f.string() << "\n";
    return res.status == 0 ? kOk : kDomainFailure;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const fsplay::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainFailure;
  }
}
