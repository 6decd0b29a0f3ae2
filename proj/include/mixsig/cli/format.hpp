#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace mixsig::cli {

/// 9 significant digits, C locale. NaN prints as "nan".
inline std::string fmt(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (v == 0.0) {
    return "0";  // folds -0
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string flag(bool b) { return b ? "1" : "0"; }

/// Comma-separated output: '#'-prefixed preamble lines, one header row, then
/// data rows.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(const std::string& line) { out_ << "# " << line << '\n'; }

  void header(const std::vector<std::string>& columns) {
    columns_ = columns.size();
    row(columns);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out_ << (i ? "," : "") << cells[i];
    }
    out_ << '\n';
  }

  std::size_t columns() const { return columns_; }

private:
  std::ostream& out_;
  std::size_t columns_ = 0;
};

} // namespace mixsig::cli
