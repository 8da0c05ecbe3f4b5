#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fsplay::cli {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  std::string label;
  bool markers = false;
  double width = 1.0;
  /// Draw the points as a closed filled polygon without legend entry.
  bool fill = false;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

/// Panels stacked vertically in one standalone SVG document.
[[nodiscard]] std::string render_svg(const std::vector<Panel>& panels, int width = 800,
                                     int panel_height = 360);

void write_svg(const std::filesystem::path& path, const std::vector<Panel>& panels);

}  // namespace fsplay::cli
