#pragma once

// Comma separated tables with `# key: value` metadata lines above the header.
// Reals are written with 17 significant digits so files round-trip exactly.

#include <string>
#include <utility>
#include <vector>

namespace dincl {

std::string format_real(double v);

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_meta(const std::string& key, const std::string& value) { meta.emplace_back(key, value); }
  void add_meta(const std::string& key, double value) { meta.emplace_back(key, format_real(value)); }

  // Empty when the key is absent.
  std::string meta_value(const std::string& key) const;

  // Throws std::runtime_error for an unknown column or a cell that is not a number.
  std::vector<double> column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

std::string to_csv(const CsvTable& t);
CsvTable parse_csv(const std::string& text);

// Both throw std::runtime_error on I/O failure.
void write_csv(const std::string& path, const CsvTable& t);
CsvTable read_csv(const std::string& path);

}  // namespace dincl
