#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsplay/integrator.hpp"
#include "fsplay/oscillator.hpp"

namespace fsplay::cli {

/// Malformed or incomplete configuration; the message names the file,
/// line and field where known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunSection {
  double T = 50.0;
  Point w0{2.5, -0.5};
  IntegratorConfig integrator = IntegratorConfig::sweep();
  double limit_dt = 1e-3;
};

struct SweepSection {
  std::vector<double> eps_list;
  double delta_small = 0.05;
  double q = 2.0;
  double c_min = -0.5;
  double c_max = 0.5;
  std::size_t c_count = 41;
  double T_settle = 0.0;
  double T_measure = 0.0;
  std::size_t workers = 0;
};

struct PatchedSection {
  double delta = 0.25;
  std::optional<double> theta;  ///< empty: use the theta schedule
  double theta_floor = 1e-12;
  bool enforce = true;
};

struct OutputSection {
  std::string dir = ".";
  bool plot = false;
};

struct Config {
  std::string source = "<defaults>";
  OscillatorParams system;
  RunSection run;
  SweepSection sweep;
  PatchedSection patched;
  OutputSection output;
};

/// Reads an INI file with sections [system], [run], [sweep], [patched]
/// and [output]. The system parameters either come from `system.preset`
/// (individual keys override preset values) or must all be given.
/// `preset_override` takes the role of system.preset when set.
[[nodiscard]] Config load_config(const std::string& path,
                                 const std::optional<std::string>& preset_override = {});

/// Configuration built from a preset name and the documented defaults.
[[nodiscard]] Config preset_config(const std::string& preset);

/// Comma or whitespace separated list of numbers.
[[nodiscard]] std::vector<double> parse_number_list(const std::string& text);

}  // namespace fsplay::cli
