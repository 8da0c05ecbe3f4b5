#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "fsplay/errors.hpp"

namespace fsplay::cli {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kSchema{
    {"system", {"preset", "a", "b", "c", "omega", "epsilon", "x_clip"}},
    {"run", {"T", "x0", "y0", "method", "rel_tol", "abs_tol", "max_step", "min_step", "limit_dt"}},
    {"sweep", {"eps_list", "delta_small", "q", "c_min", "c_max", "c_count", "T_settle", "T_measure",
               "workers"}},
    {"patched", {"delta", "theta", "theta_floor", "enforce"}},
    {"output", {"dir", "plot"}},
};

/// Line numbers of "section.key" entries, for diagnostics.
std::map<std::string, int> key_lines(const std::string& path) {
  std::map<std::string, int> lines;
  std::ifstream in(path);
  std::string line;
  std::string section;
  for (int n = 1; std::getline(in, line); ++n) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == ';' || line[first] == '#') continue;
    if (line[first] == '[') {
      const auto close = line.find(']', first);
      section = line.substr(first + 1, close == std::string::npos ? std::string::npos : close - first - 1);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(first, eq - first);
    key.erase(key.find_last_not_of(" \t") + 1);
    lines[section + "." + key] = n;
  }
  return lines;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::string path, std::map<std::string, int> lines)
      : tree_(tree), path_(std::move(path)), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    std::string where = path_;
    if (auto it = lines_.find(field); it != lines_.end()) where += ":" + std::to_string(it->second);
    throw ConfigError(where + ": field '" + field + "': " + what);
  }

  [[nodiscard]] std::optional<std::string> text(const std::string& field) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(field, '.'))) return *v;
    return std::nullopt;
  }

  [[nodiscard]] std::optional<double> number(const std::string& field) const {
    const auto t = text(field);
    if (!t) return std::nullopt;
    double v = 0.0;
    const char* b = t->data();
    const char* e = b + t->size();
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) fail(field, "expected a number, got '" + *t + "'");
    if (!std::isfinite(v)) fail(field, "value must be finite");
    return v;
  }

  void number(const std::string& field, double& out) const {
    if (auto v = number(field)) out = *v;
  }

  void positive(const std::string& field, double& out) const {
    if (auto v = number(field)) {
      if (!(*v > 0.0)) fail(field, "must be > 0");
      out = *v;
    }
  }

  void count(const std::string& field, std::size_t& out) const {
    if (auto v = number(field)) {
      if (*v < 0.0 || std::floor(*v) != *v) fail(field, "expected a non-negative integer");
      out = static_cast<std::size_t>(*v);
    }
  }

  void flag(const std::string& field, bool& out) const {
    const auto t = text(field);
    if (!t) return;
    if (*t == "true" || *t == "1" || *t == "yes" || *t == "on") {
      out = true;
    } else if (*t == "false" || *t == "0" || *t == "no" || *t == "off") {
      out = false;
    } else {
      fail(field, "expected true or false, got '" + *t + "'");
    }
  }

  void check_schema() const {
    for (const auto& [section, body] : tree_) {
      const auto it = kSchema.find(section);
      if (it == kSchema.end()) {
        if (body.empty()) fail(section, "key outside of a section");
        fail(section, "unknown section");
      }
      for (const auto& kv : body) {
        if (!it->second.count(kv.first)) fail(section + "." + kv.first, "unknown field");
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::string path_;
  std::map<std::string, int> lines_;
};

OscillatorParams preset_or_throw(const std::string& name, const std::function<void(const std::string&)>& fail) {
  try {
    return OscillatorParams::preset(name);
  } catch (const ArgumentError& e) {
    fail(e.what());
  }
  return {};
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (in >> item) {
    std::string token;
    std::istringstream parts(item);
    while (std::getline(parts, token, ',')) {
      if (token.empty()) continue;
      double v = 0.0;
      const auto r = std::from_chars(token.data(), token.data() + token.size(), v);
      if (r.ec != std::errc() || r.ptr != token.data() + token.size()) {
        throw ConfigError("not a number: '" + token + "'");
      }
      out.push_back(v);
    }
  }
  return out;
}

Config preset_config(const std::string& preset) {
  Config c;
  c.source = "preset " + preset;
  try {
    c.system = OscillatorParams::preset(preset);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

Config load_config(const std::string& path, const std::optional<std::string>& preset_override) {
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    std::string where = e.filename().empty() ? path : e.filename();
    if (e.line() > 0) where += ":" + std::to_string(e.line());
    throw ConfigError(where + ": " + e.message());
  }
  const Reader r(tree, path, key_lines(path));
  r.check_schema();

  Config c;
  c.source = path;

  const std::optional<std::string> preset = preset_override ? preset_override : r.text("system.preset");
  if (preset) {
    c.system = preset_or_throw(*preset, [&](const std::string& m) { r.fail("system.preset", m); });
  } else {
    for (const char* key : {"a", "b", "c", "omega", "epsilon"}) {
      const std::string field = std::string("system.") + key;
      if (!r.text(field)) {
        throw ConfigError(path + ": missing required field '" + field + "' (or set system.preset)");
      }
    }
  }
  r.number("system.a", c.system.a);
  r.number("system.b", c.system.b);
  r.number("system.c", c.system.c);
  r.positive("system.omega", c.system.omega);
  r.positive("system.epsilon", c.system.epsilon);
  r.positive("system.x_clip", c.system.x_clip);

  r.positive("run.T", c.run.T);
  r.number("run.x0", c.run.w0.x);
  r.number("run.y0", c.run.w0.y);
  if (const auto m = r.text("run.method")) {
    if (*m == "dopri45") {
      c.run.integrator.method = Method::AdaptiveEmbedded45;
    } else if (*m == "trapezoid") {
      c.run.integrator.method = Method::ImplicitTrapezoid;
    } else {
      r.fail("run.method", "expected dopri45 or trapezoid, got '" + *m + "'");
    }
  }
  r.positive("run.rel_tol", c.run.integrator.rel_tol);
  r.positive("run.abs_tol", c.run.integrator.abs_tol);
  r.positive("run.max_step", c.run.integrator.max_step);
  r.positive("run.min_step", c.run.integrator.min_step);
  r.positive("run.limit_dt", c.run.limit_dt);

  if (const auto list = r.text("sweep.eps_list")) {
    try {
      c.sweep.eps_list = parse_number_list(*list);
    } catch (const ConfigError& e) {
      r.fail("sweep.eps_list", e.what());
    }
  }
  r.positive("sweep.delta_small", c.sweep.delta_small);
  r.number("sweep.q", c.sweep.q);
  r.number("sweep.c_min", c.sweep.c_min);
  r.number("sweep.c_max", c.sweep.c_max);
  r.count("sweep.c_count", c.sweep.c_count);
  r.positive("sweep.T_settle", c.sweep.T_settle);
  r.positive("sweep.T_measure", c.sweep.T_measure);
  r.count("sweep.workers", c.sweep.workers);

  r.positive("patched.delta", c.patched.delta);
  if (const auto th = r.text("patched.theta"); th && *th != "auto") {
    double v = 0.0;
    r.positive("patched.theta", v);
    c.patched.theta = v;
  }
  r.positive("patched.theta_floor", c.patched.theta_floor);
  r.flag("patched.enforce", c.patched.enforce);

  if (const auto d = r.text("output.dir")) c.output.dir = *d;
  r.flag("output.plot", c.output.plot);
  return c;
}

}  // namespace fsplay::cli
