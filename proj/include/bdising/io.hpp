// Plot-ready tabular output. Every table carries a schema line so that
// downstream scripts can detect format drift, then a header row, then data
// rows printed with round-trip precision in the C locale.
#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bdising {

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvTable {
 public:
  CsvTable(std::string schema, std::vector<std::string> columns)
      : schema_(std::move(schema)), columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("CsvTable: no columns");
  }

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size())
      throw std::invalid_argument("CsvTable: row width mismatch in " + schema_);
    rows_.push_back(std::move(cells));
  }

  std::string str() const {
    std::string out = "# schema=" + schema_ + "\n";
    out += join(columns_);
    for (const auto& r : rows_) out += join(r);
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("CsvTable: cannot open " + path);
    f << str();
    if (!f) throw std::runtime_error("CsvTable: write failed for " + path);
  }

  std::size_t n_rows() const { return rows_.size(); }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    line += '\n';
    return line;
  }

  std::string schema_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace bdising
