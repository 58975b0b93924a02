// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#ifndef MISODOF_CSV_HPP
#define MISODOF_CSV_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace misodof {

/// CSV emitter: '#'-prefixed comment lines carry the resolved configuration,
/// then one header row, then data. Doubles are printed with %.17g so a rerun
/// with the same config and seed is byte-identical.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
  }

  void comment(const std::string& line) { out_ << "# " << line << "\n"; }

  void config(const std::map<std::string, std::string>& resolved) {
    for (const auto& [k, v] : resolved) out_ << "# " << k << " = " << v << "\n";
  }

  void header(const std::vector<std::string>& names) { row_of_strings(names); }

  template <typename... Fields>
  void row(const Fields&... fields) {
    std::vector<std::string> cells;
    (cells.push_back(format(fields)), ...);
    row_of_strings(cells);
  }

  void row_strings(const std::vector<std::string>& cells) { row_of_strings(cells); }

  static std::string format(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
  static std::string format(int v) { return std::to_string(v); }
  static std::string format(long v) { return std::to_string(v); }
  static std::string format(long long v) { return std::to_string(v); }
  static std::string format(std::size_t v) { return std::to_string(v); }
  static std::string format(const std::string& v) { return v; }
  static std::string format(const char* v) { return v; }

 private:
  void row_of_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

  std::ofstream out_;
};

}  // namespace misodof

#endif  // MISODOF_CSV_HPP
