#include "dincl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dincl/error.hpp"

namespace dincl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::vector<std::string>& keys() {
  static const std::vector<std::string> k = {
      "domain.length",    "mesh.n",           "F.odd",
      "F.lo.breaks",      "F.lo.branches",    "F.hi.breaks",
      "F.hi.branches",    "F.point_values",   "selection.strategy",
      "selection.sbar",   "selection.custom", "selection.jumps",
      "lambda",           "lambda.scale",     "lambda.sweep",
      "lambda.sweep.scale",
      "solver.tol_mphi",  "solver.max_iter",  "solver.step0",
      "solver.armijo",    "solver.shrink",    "solver.path_points",
      "solver.seed",      "solver.path_iter", "solver.box_bound",
      "solver.newton_iter",
      "bump.xbar",        "bump.rho",
      "potential.range",  "potential.nodes",  "potential.tol",
      "check.p",          "check.range",      "check.samples",
      "check.growth_cap",
      "plot.range",       "plot.samples",
      "verify.tol",       "output.dir",
  };
  return k;
}

class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  bool has(const std::string& key) const { return raw_.count(key) != 0; }

  const std::string& text(const std::string& key) const {
    auto it = raw_.find(key);
    if (it == raw_.end()) throw ConfigError(key, "missing required key");
    return it->second;
  }

  double real(const std::string& key, const std::string& value) const {
    double v = 0.0;
    const char* end = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || p != end) throw ConfigError(key, "expected a number, got '" + value + "'");
    if (!std::isfinite(v)) throw ConfigError(key, "value must be finite");
    return v;
  }
  double real(const std::string& key) const { return real(key, text(key)); }
  double real_or(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

  long long integer(const std::string& key, const std::string& value) const {
    long long v = 0;
    const char* end = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || p != end) throw ConfigError(key, "expected an integer, got '" + value + "'");
    return v;
  }
  long long integer(const std::string& key) const { return integer(key, text(key)); }
  long long integer_or(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  bool boolean_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = text(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key, "expected true or false, got '" + v + "'");
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    for (const std::string& item : split_list(text(key))) out.push_back(real(key, item));
    return out;
  }

  Interval range(const std::string& key, Interval fallback) const {
    if (!has(key)) return fallback;
    const std::vector<double> v = reals(key);
    if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(key, "expected 'a, b' with a < b");
    return {v[0], v[1]};
  }

  Expr expr(const std::string& key, const std::string& value) const {
    try {
      return parse_expr(value);
    } catch (const ParseError& e) {
      throw ConfigError(key, e.what());
    }
  }

 private:
  const RawConfig& raw_;
};

std::map<double, double> point_values(const Reader& r, bool upper) {
  std::map<double, double> out;
  const std::string key = "F.point_values";
  if (!r.has(key)) return out;
  for (const std::string& item : split_list(r.text(key))) {
    if (item.size() < 2 || item.front() != '(' || item.back() != ')') {
      throw ConfigError(key, "expected items of the form (s, lo, hi), got '" + item + "'");
    }
    const std::vector<std::string> parts = split_list(item.substr(1, item.size() - 2));
    if (parts.size() != 3) throw ConfigError(key, "expected (s, lo, hi), got '" + item + "'");
    const double s = r.real(key, parts[0]);
    const double lo = r.real(key, parts[1]);
    const double hi = r.real(key, parts[2]);
    if (lo > hi) throw ConfigError(key, "lo > hi in '" + item + "'");
    if (out.count(s)) throw ConfigError(key, "duplicate point " + parts[0]);
    out[s] = upper ? hi : lo;
  }
  return out;
}

PiecewiseFn envelope(const Reader& r, const std::string& prefix, std::map<double, double> pv) {
  const std::string bkey = prefix + ".branches";
  std::vector<Expr> branches;
  for (const std::string& item : split_list(r.text(bkey))) branches.push_back(r.expr(bkey, item));
  try {
    return PiecewiseFn(r.reals(prefix + ".breaks"), std::move(branches), std::move(pv));
  } catch (const InvalidMap& e) {
    throw ConfigError(prefix, e.what());
  }
}

std::optional<Sweep> sweep(const Reader& r) {
  const bool abs = r.has("lambda.sweep"), rel = r.has("lambda.sweep.scale");
  if (abs && rel) throw ConfigError("lambda.sweep", "give either lambda.sweep or lambda.sweep.scale");
  if (!abs && !rel) return std::nullopt;
  const std::string key = abs ? "lambda.sweep" : "lambda.sweep.scale";
  const std::vector<std::string> parts = split_list(r.text(key));
  if (parts.size() != 3) throw ConfigError(key, "expected 'start, stop, count'");
  Sweep s;
  s.start = r.real(key, parts[0]);
  s.stop = r.real(key, parts[1]);
  const long long count = r.integer(key, parts[2]);
  if (count < 1) throw ConfigError(key, "count must be at least 1");
  if (count > 100000) throw ConfigError(key, "count is unreasonably large");
  s.count = static_cast<int>(count);
  s.relative = rel;
  if (!(s.start > 0) || !(s.stop > 0)) throw ConfigError(key, "lambda values must be positive");
  if (s.stop < s.start) throw ConfigError(key, "stop must not be below start");
  return s;
}

}  // namespace

std::vector<std::string> known_config_keys() { return keys(); }

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  if (trim(value).empty()) return out;
  int depth = 0;
  std::string cur;
  for (char c : value) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

RawConfig parse_config_text(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line, "line " + std::to_string(lineno) + " is not of the form key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + " has an empty key");
    if (raw.count(key)) throw ConfigError(key, "given twice (line " + std::to_string(lineno) + ")");
    raw[key] = trim(line.substr(eq + 1));
  }
  return raw;
}

RawConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_overrides(RawConfig& raw, const Overrides& o) {
  auto num = [](auto v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
  };
  if (o.lambda) {
    raw.erase("lambda.scale");
    raw["lambda"] = num(*o.lambda);
  }
  if (o.seed) raw["solver.seed"] = std::to_string(*o.seed);
  if (o.mesh) raw["mesh.n"] = std::to_string(*o.mesh);
  if (o.out) raw["output.dir"] = *o.out;
}

ProblemConfig load_config(const RawConfig& raw) {
  const std::vector<std::string>& k = keys();
  const std::set<std::string> known(k.begin(), k.end());
  for (const auto& [key, value] : raw) {
    if (!known.count(key)) throw ConfigError(key, "unknown key");
    if (value.empty()) throw ConfigError(key, "empty value");
  }
  const Reader r(raw);
  ProblemConfig c;

  c.length = r.real_or("domain.length", 1.0);
  if (!(c.length > 0)) throw ConfigError("domain.length", "must be positive");
  const long long n = r.integer_or("mesh.n", 199);
  if (n < 1) throw ConfigError("mesh.n", "must be at least 1");
  c.n = static_cast<std::size_t>(n);

  PiecewiseFn lo = envelope(r, "F.lo", point_values(r, false));
  PiecewiseFn hi = envelope(r, "F.hi", point_values(r, true));
  try {
    c.F = std::make_shared<const IntervalMap>(std::move(lo), std::move(hi), r.boolean_or("F.odd", false));
  } catch (const InvalidMap& e) {
    throw ConfigError("F", e.what());
  }

  const std::string strategy = r.has("selection.strategy") ? r.text("selection.strategy") : "theorem_app";
  Strategy st;
  try {
    st = strategy_from_string(strategy);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("selection.strategy", e.what());
  }
  c.sbar = r.real_or("selection.sbar", 1.0);
  if (!(c.sbar > 0)) throw ConfigError("selection.sbar", "must be positive");
  std::optional<Expr> custom;
  if (st == Strategy::Custom) custom = r.expr("selection.custom", r.text("selection.custom"));
  else if (r.has("selection.custom")) throw ConfigError("selection.custom", "only used with strategy custom");
  try {
    c.selection = std::make_shared<const Selection>(c.F, st, c.sbar, custom, r.reals("selection.jumps"));
  } catch (const std::exception& e) {
    throw ConfigError("selection", e.what());
  }
  if (st == Strategy::Custom) {
    // catch a custom expression that leaves [min F, max F] before any solve
    try {
      for (int k = -2000; k <= 2000; ++k) (*c.selection)(k * 0.005);
    } catch (const Error& e) {
      throw ConfigError("selection.custom", e.what());
    }
  }

  if (r.has("lambda") && r.has("lambda.scale")) throw ConfigError("lambda", "give either lambda or lambda.scale");
  if (r.has("lambda")) {
    c.lambda.value = r.real("lambda");
    if (!(*c.lambda.value > 0)) throw ConfigError("lambda", "must be positive");
  }
  if (r.has("lambda.scale")) {
    c.lambda.scale = r.real("lambda.scale");
    if (!(*c.lambda.scale > 0)) throw ConfigError("lambda.scale", "must be positive");
  }
  c.lambda.sweep = sweep(r);

  SolverOptions& o = c.solver;
  o.tol_mphi = r.real_or("solver.tol_mphi", o.tol_mphi);
  o.max_iter = static_cast<int>(r.integer_or("solver.max_iter", o.max_iter));
  o.step0 = r.real_or("solver.step0", o.step0);
  o.armijo = r.real_or("solver.armijo", o.armijo);
  o.shrink = r.real_or("solver.shrink", o.shrink);
  o.path_points = static_cast<int>(r.integer_or("solver.path_points", o.path_points));
  const long long seed = r.integer_or("solver.seed", static_cast<long long>(o.seed));
  if (seed < 0) throw ConfigError("solver.seed", "must be non-negative");
  o.seed = static_cast<std::uint64_t>(seed);
  o.path_iter = static_cast<int>(r.integer_or("solver.path_iter", o.path_iter));
  o.box_bound = r.real_or("solver.box_bound", o.box_bound);
  o.newton_iter = static_cast<int>(r.integer_or("solver.newton_iter", o.newton_iter));
  try {
    o.validate();
  } catch (const std::invalid_argument& e) {
    // "solver.key must ..."
    const std::string msg = e.what();
    const auto space = msg.find(' ');
    throw ConfigError(msg.substr(0, space), msg.substr(space + 1));
  }

  c.bump = BumpGeometry::centered(c.length, c.sbar);
  c.bump.xbar = r.real_or("bump.xbar", c.bump.xbar);
  c.bump.rho = r.real_or("bump.rho", c.bump.rho);
  if (!(c.bump.rho > 0)) throw ConfigError("bump.rho", "must be positive");
  if (!(c.bump.xbar - 2 * c.bump.rho > 0 && c.bump.xbar + 2 * c.bump.rho < c.length)) {
    throw ConfigError(r.has("bump.rho") ? "bump.rho" : "bump.xbar", "bump support must lie inside (0, L)");
  }

  c.table.range = r.real_or("potential.range", c.table.range);
  if (!(c.table.range > 0)) throw ConfigError("potential.range", "must be positive");
  const long long nodes = r.integer_or("potential.nodes", static_cast<long long>(c.table.nodes));
  if (nodes < 3) throw ConfigError("potential.nodes", "must be at least 3");
  c.table.nodes = static_cast<std::size_t>(nodes);
  c.table.tol = r.real_or("potential.tol", c.table.tol);
  if (!(c.table.tol > 0)) throw ConfigError("potential.tol", "must be positive");

  c.check_p = r.real_or("check.p", c.check_p);
  if (!(c.check_p > 1)) throw ConfigError("check.p", "must exceed 1");
  c.check_range = r.range("check.range", c.check_range);
  c.check_samples = static_cast<int>(r.integer_or("check.samples", c.check_samples));
  if (c.check_samples < 2) throw ConfigError("check.samples", "must be at least 2");
  c.growth_cap = r.real_or("check.growth_cap", c.growth_cap);
  if (!(c.growth_cap > 0)) throw ConfigError("check.growth_cap", "must be positive");

  c.plot_range = r.range("plot.range", c.plot_range);
  c.plot_samples = static_cast<int>(r.integer_or("plot.samples", c.plot_samples));
  if (c.plot_samples < 2) throw ConfigError("plot.samples", "must be at least 2");

  c.verify_tol = r.real_or("verify.tol", o.tol_mphi);
  if (!(c.verify_tol > 0)) throw ConfigError("verify.tol", "must be positive");
  if (r.has("output.dir")) c.output_dir = r.text("output.dir");

  for (const auto& [key, value] : raw) {
    if (key != "output.dir") c.canonical += key + " = " + value + "\n";
  }
  return c;
}

}  // namespace dincl
