#pragma once

// CSV output with '.' decimal separator and 17 significant digits, so that
// doubles round-trip exactly and identical runs produce identical bytes.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace osclab {

using CsvCell = std::variant<long long, double, std::string>;

inline std::string csv_format(const CsvCell& cell) {
  if (std::holds_alternative<long long>(cell))
    return std::to_string(std::get<long long>(cell));
  if (std::holds_alternative<double>(cell)) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(cell));
    return buf;
  }
  return std::get<std::string>(cell);
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary), cols_(header.size()) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    for (size_t i = 0; i < header.size(); ++i)
      out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
  }

  void row(const std::vector<CsvCell>& cells) {
    if (cells.size() != cols_)
      throw std::invalid_argument("CsvWriter: column count mismatch");
    for (size_t i = 0; i < cells.size(); ++i)
      out_ << csv_format(cells[i]) << (i + 1 < cells.size() ? "," : "\n");
  }

 private:
  std::ofstream out_;
  size_t cols_;
};

}  // namespace osclab
