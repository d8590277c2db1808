#include "dincl/run.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "dincl/csv.hpp"
#include "dincl/error.hpp"
#include "json.hpp"

namespace dincl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string out_path(const ProblemConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return (fs::path(cfg.output_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double sup_norm(const DiscreteState& u) {
  double m = 0.0;
  for (double v : u.u) m = std::max(m, std::abs(v));
  return m;
}

json point_json(const CriticalPoint& p) {
  return {{"energy", p.energy},         {"m_phi", p.m_phi},
          {"iterations", p.iterations}, {"status", to_string(p.status)},
          {"diagnostic", p.diagnostic}, {"sup_norm", sup_norm(p.u)},
          {"u", p.u.u}};
}

json certificate_json(const Certificate& c) {
  return {{"residual_norm", c.residual_norm}, {"inclusion_slack", c.inclusion_slack},
          {"shrink_slack", c.shrink_slack},   {"tol", c.tol},
          {"verdict", c.verdict},             {"consistent", c.consistent},
          {"set_valued_nodes", c.set_valued_nodes}};
}

std::string yes(bool b) { return b ? "true" : "false"; }

void add_problem_meta(CsvTable& t, const ProblemConfig& cfg) {
  t.add_meta("config_hash", hex(fnv1a(cfg.canonical)));
  t.add_meta("length", cfg.length);
  t.add_meta("n", std::to_string(cfg.n));
  t.add_meta("strategy", to_string(cfg.selection->strategy()));
  t.add_meta("sbar", cfg.sbar);
  t.add_meta("seed", std::to_string(cfg.solver.seed));
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::optional<double> config_lambda_star(const ProblemConfig& cfg, const Mesh1D& mesh) {
  try {
    return lambda_star(*cfg.selection, cfg.bump, mesh);
  } catch (const HypothesisViolation&) {
    return std::nullopt;
  }
}

double resolve_lambda(const ProblemConfig& cfg, const std::optional<double>& ls) {
  if (cfg.lambda.value) return *cfg.lambda.value;
  if (cfg.lambda.scale) {
    if (!ls) throw ConfigError("lambda.scale", "lambda* is unavailable because J_f(sbar) <= 0");
    return *cfg.lambda.scale * *ls;
  }
  throw ConfigError("lambda", "missing required key (or lambda.scale)");
}

std::vector<double> sweep_lambdas(const ProblemConfig& cfg, const std::optional<double>& ls) {
  if (!cfg.lambda.sweep) throw ConfigError("lambda.sweep", "missing required key (or lambda.sweep.scale)");
  const Sweep& s = *cfg.lambda.sweep;
  double unit = 1.0;
  if (s.relative) {
    if (!ls) throw ConfigError("lambda.sweep.scale", "lambda* is unavailable because J_f(sbar) <= 0");
    unit = *ls;
  }
  std::vector<double> out;
  for (int k = 0; k < s.count; ++k) {
    const double c = s.count == 1 ? s.start : s.start + (s.stop - s.start) * k / (s.count - 1);
    out.push_back(c * unit);
  }
  return out;
}

std::string RunRecord::to_json() const {
  json j;
  j["config_hash"] = hex(config_hash);
  j["lambda"] = lambda;
  j["lambda_star"] = two.lambda_star ? json(*two.lambda_star) : json(nullptr);
  j["eta_r"] = two.eta_r;
  j["multiplicity"] = two.multiplicity;
  j["warnings"] = two.warnings;
  j["u1"] = point_json(two.u1);
  j["u2"] = point_json(two.u2);
  j["certificate1"] = certificate_json(c1);
  j["certificate2"] = certificate_json(c2);
  j["wall_seconds"] = wall_seconds;
  j["exit_code"] = exit_code;
  return j.dump(2) + "\n";
}

namespace {

RunRecord solve_with(const ProblemConfig& cfg, const EnergyModel& m) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord r;
  r.config_hash = fnv1a(cfg.canonical);
  r.lambda = m.lambda();
  r.two = solve_two(m, cfg.bump, cfg.solver);
  r.c1 = certify(m, r.two.u1.u, cfg.verify_tol);
  r.c2 = certify(m, r.two.u2.u, cfg.verify_tol);
  r.exit_code = solve_exit_code(r);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

RunRecord run_solve(const ProblemConfig& cfg, double lambda) {
  return solve_with(cfg, EnergyModel(cfg.mesh(), cfg.selection, lambda, cfg.table));
}

int solve_exit_code(const RunRecord& r) {
  if (r.two.lambda_star && r.lambda < *r.two.lambda_star) return kExitPrecondition;
  if (!r.two.multiplicity) return kExitNotMultiple;
  if (!r.c1.verdict || !r.c2.verdict) return kExitFailed;
  return kExitOk;
}

int cmd_check(const ProblemConfig& cfg, std::ostream& log) {
  const UscReport usc = check_usc(*cfg.F);
  const GrowthFit growth = check_growth(*cfg.F, cfg.check_p, cfg.check_range, cfg.check_samples, cfg.growth_cap);
  const HypothesisReport hyp = check_hypotheses(*cfg.F, cfg.sbar);
  const bool pass = usc.ok && growth.within_cap && hyp.all();

  std::ostringstream txt;
  txt << "sampled certificates; grids and tolerances are listed with each check\n\n";
  txt << "usc: " << (usc.ok ? "pass" : "FAIL") << " (" << usc.points_checked << " points)\n";
  for (const UscViolation& v : usc.violations) {
    txt << "  violation at s=" << format_real(v.s) << ": " << v.kind << ": " << v.detail << "\n";
  }
  txt << "growth: " << (growth.within_cap ? "pass" : "FAIL") << " a=" << format_real(growth.bound.a)
      << " p=" << format_real(growth.bound.p) << " argmax=" << format_real(growth.argmax) << " cap="
      << format_real(cfg.growth_cap) << " range=[" << format_real(cfg.check_range.lo) << ", "
      << format_real(cfg.check_range.hi) << "] samples=" << cfg.check_samples << "\n";
  auto line = [&txt](const char* name, const HypothesisResult& h) {
    txt << name << ": " << (h.pass ? "pass" : "FAIL") << " value=" << format_real(h.value) << " " << h.detail
        << "\n";
  };
  line("zero", hyp.zero);
  line("inf", hyp.inf);
  line("ss", hyp.ss);
  txt << "\nresult: " << (pass ? "all checks pass" : "some checks fail") << "\n";

  json j;
  j["config_hash"] = hex(fnv1a(cfg.canonical));
  j["pass"] = pass;
  json viol = json::array();
  for (const UscViolation& v : usc.violations) viol.push_back({{"s", v.s}, {"kind", v.kind}, {"detail", v.detail}});
  j["usc"] = {{"pass", usc.ok}, {"points_checked", usc.points_checked}, {"violations", viol}};
  j["growth"] = {{"pass", growth.within_cap}, {"a", growth.bound.a}, {"p", growth.bound.p},
                 {"argmax", growth.argmax}, {"cap", cfg.growth_cap}};
  auto hj = [](const HypothesisResult& h) { return json{{"pass", h.pass}, {"value", h.value}, {"detail", h.detail}}; };
  j["zero"] = hj(hyp.zero);
  j["inf"] = hj(hyp.inf);
  j["ss"] = hj(hyp.ss);

  write_text(out_path(cfg, "check_report.txt"), txt.str());
  write_text(out_path(cfg, "check_report.json"), j.dump(2) + "\n");
  log << txt.str();
  return pass ? kExitOk : kExitFailed;
}

int cmd_potential(const ProblemConfig& cfg, std::ostream& log) {
  const Selection& sel = *cfg.selection;
  CsvTable t;
  add_problem_meta(t, cfg);
  t.header = {"s", "f", "f_minus", "f_plus", "J_f", "aumann_min", "aumann_max"};
  const Interval r = cfg.plot_range;
  int errors = 0;
  for (int k = 0; k < cfg.plot_samples; ++k) {
    const double s = r.lo + (r.hi - r.lo) * k / (cfg.plot_samples - 1);
    std::vector<std::string> row{format_real(s)};
    try {
      const Interval lim = sel.essential_limits(s);
      const Interval a = aumann(*cfg.F, s, cfg.table.tol);
      for (double v : {sel(s), lim.lo, lim.hi, sel.potential(s, cfg.table.tol), a.lo, a.hi}) {
        row.push_back(format_real(v));
      }
    } catch (const Error& e) {
      ++errors;
      t.add_meta("row_error", "s=" + format_real(s) + ": " + e.what());
      row.resize(t.header.size(), "nan");
    }
    t.rows.push_back(std::move(row));
  }
  const std::string path = out_path(cfg, "potential.csv");
  write_csv(path, t);
  log << "wrote " << path << " (" << t.rows.size() << " rows, " << errors << " errors)\n";
  return errors == 0 ? kExitOk : kExitFailed;
}

int cmd_solve(const ProblemConfig& cfg, std::ostream& log) {
  const Mesh1D mesh = cfg.mesh();
  const double lambda = resolve_lambda(cfg, config_lambda_star(cfg, mesh));
  const RunRecord rec = run_solve(cfg, lambda);

  CsvTable t;
  add_problem_meta(t, cfg);
  t.add_meta("lambda", lambda);
  t.add_meta("lambda_star", rec.two.lambda_star ? format_real(*rec.two.lambda_star) : "unavailable");
  t.add_meta("energy1", rec.two.u1.energy);
  t.add_meta("energy2", rec.two.u2.energy);
  t.add_meta("status1", to_string(rec.two.u1.status));
  t.add_meta("status2", to_string(rec.two.u2.status));
  t.header = {"x", "u1", "w1", "u2", "w2"};
  for (std::size_t i = 0; i < mesh.n; ++i) {
    t.rows.push_back({format_real(mesh.x(i)), format_real(rec.two.u1.u.u[i]), format_real(rec.c1.w[i]),
                      format_real(rec.two.u2.u.u[i]), format_real(rec.c2.w[i])});
  }
  write_csv(out_path(cfg, "solution.csv"), t);
  write_text(out_path(cfg, "run_record.json"), rec.to_json());

  std::ostringstream s;
  s << "lambda*: " << (rec.two.lambda_star ? format_real(*rec.two.lambda_star) : "unavailable") << "\n";
  s << "lambda: " << format_real(lambda) << "\n";
  auto point = [&s](const char* name, const CriticalPoint& p, const Certificate& c) {
    s << name << ": energy=" << format_real(p.energy) << " m_phi=" << format_real(p.m_phi)
      << " sup=" << format_real(sup_norm(p.u)) << " status=" << to_string(p.status)
      << " verdict=" << yes(c.verdict) << " inclusion_slack=" << format_real(c.inclusion_slack);
    if (!p.diagnostic.empty()) s << " (" << p.diagnostic << ")";
    s << "\n";
  };
  point("u1", rec.two.u1, rec.c1);
  point("u2", rec.two.u2, rec.c2);
  s << "multiplicity: " << yes(rec.two.multiplicity) << "\n";
  for (const std::string& w : rec.two.warnings) s << "warning: " << w << "\n";
  s << "wall seconds: " << rec.wall_seconds << "\n";
  write_text(out_path(cfg, "summary.txt"), s.str());
  log << s.str();
  return rec.exit_code;
}

int cmd_sweep(const ProblemConfig& cfg, std::ostream& log) {
  const Mesh1D mesh = cfg.mesh();
  const std::optional<double> ls = config_lambda_star(cfg, mesh);
  const std::vector<double> lambdas = sweep_lambdas(cfg, ls);
  const EnergyModel base(mesh, cfg.selection, lambdas.front(), cfg.table);

  struct Row {
    std::optional<RunRecord> rec;
    std::string error;
  };
  std::vector<Row> rows(lambdas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < lambdas.size();) {
      try {
        rows[k].rec = solve_with(cfg, base.with_lambda(lambdas[k]));
      } catch (const std::exception& e) {
        rows[k].error = e.what();
      }
    }
  };
  const std::size_t nthreads =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::min<std::size_t>(lambdas.size(), 8));
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();

  CsvTable t;
  add_problem_meta(t, cfg);
  t.add_meta("lambda_star", ls ? format_real(*ls) : "unavailable");
  t.add_meta("norm", "sup");
  t.header = {"lambda", "energy1", "energy2", "norm1", "norm2", "mphi1", "mphi2", "verdicts"};
  bool ok = true;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!rows[k].rec) {
      ok = false;
      t.add_meta("row_error", "lambda=" + format_real(lambdas[k]) + ": " + rows[k].error);
      t.rows.push_back({format_real(lambdas[k]), "nan", "nan", "nan", "nan", "nan", "nan", "false"});
      continue;
    }
    const RunRecord& r = *rows[k].rec;
    const bool verdicts = r.c1.verdict && r.c2.verdict;
    if (ls && lambdas[k] >= *ls && !verdicts) ok = false;
    t.rows.push_back({format_real(lambdas[k]), format_real(r.two.u1.energy), format_real(r.two.u2.energy),
                      format_real(sup_norm(r.two.u1.u)), format_real(sup_norm(r.two.u2.u)),
                      format_real(r.two.u1.m_phi), format_real(r.two.u2.m_phi), yes(verdicts)});
  }
  const std::string path = out_path(cfg, "sweep.csv");
  write_csv(path, t);
  log << "wrote " << path << " (" << t.rows.size() << " rows)\n";
  log << "lambda*: " << (ls ? format_real(*ls) : "unavailable") << "\n";
  return ok ? kExitOk : kExitFailed;
}

int cmd_verify(const ProblemConfig& cfg, const std::string& solution_csv, std::optional<double> lambda,
               std::ostream& log) {
  const CsvTable in = read_csv(solution_csv);
  const Mesh1D mesh = cfg.mesh();
  if (in.rows.size() != mesh.n) {
    throw std::runtime_error("dimension mismatch: " + solution_csv + " has " + std::to_string(in.rows.size()) +
                             " rows, the mesh has n = " + std::to_string(mesh.n));
  }
  if (in.has_column("x")) {
    const std::vector<double> x = in.column("x");
    for (std::size_t i = 0; i < mesh.n; ++i) {
      if (std::abs(x[i] - mesh.x(i)) > 1e-9 * mesh.length) {
        throw std::runtime_error("dimension mismatch: x column does not match the mesh at row " +
                                 std::to_string(i + 1));
      }
    }
  }
  std::vector<std::string> cols;
  for (const std::string& h : in.header) {
    if (h == "u" || (h.size() > 1 && h[0] == 'u' && std::all_of(h.begin() + 1, h.end(), [](unsigned char ch) { return std::isdigit(ch); }))) {
      cols.push_back(h);
    }
  }
  if (cols.empty()) throw std::runtime_error(solution_csv + " has no u column (u, u1, u2, ...)");

  if (!lambda && !in.meta_value("lambda").empty()) lambda = std::stod(in.meta_value("lambda"));
  if (!lambda) lambda = resolve_lambda(cfg, config_lambda_star(cfg, mesh));
  const EnergyModel m(mesh, cfg.selection, *lambda, cfg.table);

  bool all = true;
  std::ostringstream txt;
  json j;
  j["config_hash"] = hex(fnv1a(cfg.canonical));
  j["lambda"] = *lambda;
  txt << "lambda: " << format_real(*lambda) << "\n";
  for (const std::string& c : cols) {
    const Certificate cert = certify(m, DiscreteState(in.column(c)), cfg.verify_tol);
    all = all && cert.verdict;
    txt << c << ": verdict=" << yes(cert.verdict) << " residual=" << format_real(cert.residual_norm)
        << " inclusion_slack=" << format_real(cert.inclusion_slack) << " shrink_slack="
        << format_real(cert.shrink_slack) << " consistent=" << yes(cert.consistent)
        << " set_valued_nodes=" << cert.set_valued_nodes << "\n";
    j[c] = certificate_json(cert);
  }
  j["verdict"] = all;
  write_text(out_path(cfg, "verify_report.txt"), txt.str());
  write_text(out_path(cfg, "verify_report.json"), j.dump(2) + "\n");
  log << txt.str();
  return all ? kExitOk : kExitFailed;
}

}  // namespace dincl
