#pragma once

// Flat `key = value` problem files. Lists are comma separated; commas inside
// parentheses belong to the item (so `min(s, 1)` and `(1, 0, 1)` are single items).

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dincl/discretize.hpp"
#include "dincl/expr.hpp"
#include "dincl/selection.hpp"
#include "dincl/setvalued.hpp"
#include "dincl/solvers.hpp"

namespace dincl {

// Key -> trimmed value text.
using RawConfig = std::map<std::string, std::string>;

// Throws ConfigError on malformed lines or duplicate keys.
RawConfig parse_config_text(const std::string& text);
RawConfig read_config_file(const std::string& path);

std::vector<std::string> split_list(const std::string& value);

struct Sweep {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  bool relative = false;  // start/stop in units of lambda*
};

struct LambdaSpec {
  std::optional<double> value;  // absolute
  std::optional<double> scale;  // multiple of lambda*
  std::optional<Sweep> sweep;
};

struct ProblemConfig {
  double length = 1.0;
  std::size_t n = 199;

  std::shared_ptr<const IntervalMap> F;
  std::shared_ptr<const Selection> selection;
  double sbar = 1.0;

  LambdaSpec lambda;
  SolverOptions solver;
  BumpGeometry bump;
  TableSpec table;

  double check_p = 2.0;
  Interval check_range{-100.0, 100.0};
  int check_samples = 4001;
  double growth_cap = 1e6;

  Interval plot_range{-2.0, 2.0};
  int plot_samples = 401;

  double verify_tol = 1e-6;
  std::string output_dir = "out";

  // Sorted `key = value` lines of every key that was set except output.dir;
  // hashed into run records.
  std::string canonical;

  Mesh1D mesh() const { return Mesh1D(length, n); }
};

struct Overrides {
  std::optional<double> lambda;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> mesh;
  std::optional<std::string> out;
};

// Overrides are written into the raw keys before validation, so they show
// up in `canonical` exactly like file values.
void apply_overrides(RawConfig& raw, const Overrides& o);

// Throws ConfigError naming the key for unknown, missing or invalid entries.
ProblemConfig load_config(const RawConfig& raw);

std::vector<std::string> known_config_keys();

}  // namespace dincl
