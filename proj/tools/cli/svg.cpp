#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fsplay::cli {
namespace {

constexpr std::size_t kMaxPoints = 20000;

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  [[nodiscard]] double map(double v) const { return log ? std::log10(v) : v; }
  [[nodiscard]] double frac(double v) const { return (map(v) - lo) / (hi - lo); }
};

Axis fit_axis(const std::vector<Series>& series, bool use_x, bool log) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (double v : use_x ? s.x : s.y) {
      if (!std::isfinite(v) || (log && v <= 0.0)) continue;
      const double m = log ? std::log10(v) : v;
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.04 * (hi - lo);
  return {lo - pad, hi + pad, log};
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v, bool log) {
  std::ostringstream os;
  os.precision(3);
  if (log) {
    os << "1e" << static_cast<int>(std::lround(v));
  } else {
    os << v;
  }
  return os.str();
}

double nice_step(double range, bool log) {
  const double raw = range / 5.0;
  if (log) return std::max(1.0, std::round(raw));
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::vector<double> ticks(const Axis& a) {
  const double step = nice_step(a.hi - a.lo, a.log);
  std::vector<double> out;
  for (double v = std::ceil(a.lo / step) * step; v <= a.hi + 1e-9 * step; v += step) {
    out.push_back(std::abs(v) < 1e-9 * step ? 0.0 : v);
  }
  return out;
}

void draw_panel(std::ostringstream& o, const Panel& p, double top, int width, int height) {
  const double left = 70.0;
  const double right = width - 20.0;
  const double ptop = top + 30.0;
  const double pbot = top + height - 45.0;
  const Axis ax = fit_axis(p.series, true, p.log_x);
  const Axis ay = fit_axis(p.series, false, p.log_y);
  auto px = [&](double v) { return left + ax.frac(v) * (right - left); };
  auto py = [&](double v) { return pbot - ay.frac(v) * (pbot - ptop); };

  o << "<text x=\"" << width / 2 << "\" y=\"" << top + 20 << "\" text-anchor=\"middle\" "
    << "font-size=\"14\">" << escape(p.title) << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << ptop << "\" width=\"" << right - left << "\" height=\""
    << pbot - ptop << "\" fill=\"none\" stroke=\"#444\"/>\n";

  for (double v : ticks(ax)) {
    const double sx = left + (v - ax.lo) / (ax.hi - ax.lo) * (right - left);
    o << "<line x1=\"" << sx << "\" y1=\"" << pbot << "\" x2=\"" << sx << "\" y2=\"" << pbot + 5
      << "\" stroke=\"#444\"/>\n";
    o << "<text x=\"" << sx << "\" y=\"" << pbot + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << tick_label(v, ax.log) << "</text>\n";
  }
  for (double v : ticks(ay)) {
    const double sy = pbot - (v - ay.lo) / (ay.hi - ay.lo) * (pbot - ptop);
    o << "<line x1=\"" << left - 5 << "\" y1=\"" << sy << "\" x2=\"" << left << "\" y2=\"" << sy
      << "\" stroke=\"#444\"/>\n";
    o << "<text x=\"" << left - 8 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << tick_label(v, ay.log) << "</text>\n";
  }
  o << "<text x=\"" << (left + right) / 2 << "\" y=\"" << pbot + 36
    << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(p.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << (ptop + pbot) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
    << "transform=\"rotate(-90 16 " << (ptop + pbot) / 2 << ")\">" << escape(p.y_label) << "</text>\n";

  double legend_y = ptop + 14;
  for (const auto& s : p.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / kMaxPoints);
    std::ostringstream pts;
    pts.precision(6);
    for (std::size_t i = 0; i < n; i += stride) {
      const bool ok = std::isfinite(s.x[i]) && std::isfinite(s.y[i]) && (!ax.log || s.x[i] > 0) &&
                      (!ay.log || s.y[i] > 0);
      if (!ok) continue;
      if (s.markers) {
        o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << s.color
          << "\"/>\n";
      }
      pts << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    if (s.fill) {
      o << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\""
        << pts.str() << "\"/>\n";
      continue;
    }
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << s.width
      << "\" points=\"" << pts.str() << "\"/>\n";
    if (!s.label.empty()) {
      o << "<line x1=\"" << right - 150 << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << right - 130
        << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
      o << "<text x=\"" << right - 125 << "\" y=\"" << legend_y << "\" font-size=\"11\">"
        << escape(s.label) << "</text>\n";
      legend_y += 15;
    }
  }
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels, int width, int panel_height) {
  std::ostringstream o;
  o.precision(6);
  const int height = panel_height * static_cast<int>(std::max<std::size_t>(panels.size(), 1));
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    draw_panel(o, panels[i], static_cast<double>(i) * panel_height, width, panel_height);
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const std::filesystem::path& path, const std::vector<Panel>& panels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << render_svg(panels);
}

}  // namespace fsplay::cli
