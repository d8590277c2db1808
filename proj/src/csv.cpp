#include "dincl/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dincl {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvTable::meta_value(const std::string& key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return {};
}

bool CsvTable::has_column(const std::string& name) const {
  for (const std::string& h : header) {
    if (h == name) return true;
  }
  return false;
}

std::vector<double> CsvTable::column(const std::string& name) const {
  std::size_t idx = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) idx = j;
  }
  if (idx == header.size()) throw std::runtime_error("csv has no column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (idx >= rows[i].size()) throw std::runtime_error("csv row " + std::to_string(i + 1) + " is short");
    const std::string& cell = rows[i][idx];
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0') {
      throw std::runtime_error("csv column '" + name + "' row " + std::to_string(i + 1) + ": '" + cell +
                               "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

std::string to_csv(const CsvTable& t) {
  std::string s;
  for (const auto& [k, v] : t.meta) s += "# " + k + ": " + v + "\n";
  auto line = [&s](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) s += (j ? "," : "") + cells[j];
    s += "\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return s;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(1, colon - 1);
      std::string value = line.substr(colon + 1);
      key.erase(0, key.find_first_not_of(' '));
      value.erase(0, value.find_first_not_of(' '));
      t.meta.emplace_back(key, value);
      continue;
    }
    if (!have_header) {
      t.header = split_row(line);
      have_header = true;
    } else {
      t.rows.push_back(split_row(line));
      if (t.rows.back().size() != t.header.size()) {
        throw std::runtime_error("csv row " + std::to_string(t.rows.size()) + " has " +
                                 std::to_string(t.rows.back().size()) + " cells, header has " +
                                 std::to_string(t.header.size()));
      }
    }
  }
  if (!have_header) throw std::runtime_error("csv has no header row");
  return t;
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << to_csv(t);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace dincl
