#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace fsplay::cli {

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] std::string format_number(double v);
/// Empty string for an empty optional.
[[nodiscard]] std::string format_number(const std::optional<double>& v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace fsplay::cli
