#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringmag {

// 17 significant digits: doubles survive a write/parse round trip exactly.
inline std::string csv_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> cols) : header(std::move(cols)) {}

  void add_row(std::vector<std::string> cells) {
    if (!header.empty() && cells.size() != header.size())
      throw std::invalid_argument("csv: row width differs from header");
    rows.push_back(std::move(cells));
  }

  std::string to_string() const {
    std::ostringstream out;
    auto emit = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
      }
      out << '\n';
    };
    if (!header.empty()) emit(header);
    for (const auto& r : rows) emit(r);
    return out.str();
  }
};

// Full content lands under a temp name first; rename is atomic on POSIX, so
// concurrent readers never observe a half-written file.
inline void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("csv: cannot open '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("csv: write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("csv: rename to '" + path + "' failed");
}

inline void write_csv(const std::string& path, const CsvTable& table) {
  atomic_write(path, table.to_string());
}

// Minimal reader for round-trip tests and downstream tooling; no quoting,
// values are plain tokens.
inline CsvTable read_csv(const std::string& path, bool has_header = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) cells.push_back(tok);
    if (first && has_header) {
      t.header = cells;
      first = false;
      continue;
    }
    first = false;
    t.rows.push_back(cells);
  }
  return t;
}

}  // namespace ringmag
