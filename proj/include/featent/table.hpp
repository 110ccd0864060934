#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "featent/error.hpp"
#include "featent/version.hpp"

namespace featent {

/// Six significant digits. printf rounds exact decimal ties to even.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x == 0.0 ? 0.0 : x);
  return buf;
}

/// CSV table with a provenance line (`# featent <version> ...`) followed by a
/// column header. Cells are written verbatim; callers keep them comma-free.
class CsvTable {
 public:
  CsvTable(std::string provenance, std::vector<std::string> columns)
      : provenance_(std::move(provenance)), columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw InvariantError("CSV row width does not match header");
    rows_.push_back(std::move(cells));
  }

  std::size_t size() const noexcept { return rows_.size(); }

  std::string str() const {
    std::string out = std::string("# ") + kToolName + " " + kVersion + " " + provenance_ + "\n";
    append_line(out, columns_);
    for (const auto& r : rows_) append_line(out, r);
    return out;
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path.string());
    f << str();
    if (!f) throw IoError("write failed for " + path.string());
  }

 private:
  static void append_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  }

  std::string provenance_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace featent
