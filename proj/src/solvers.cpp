#include "dincl/solvers.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "dincl/error.hpp"

namespace dincl {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::MaxIter: return "max_iter";
    case Status::Stalled: return "stalled";
  }
  return "?";
}

void SolverOptions::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  need(tol_mphi > 0, "solver.tol_mphi must be positive");
  need(max_iter > 0, "solver.max_iter must be positive");
  need(step0 > 0, "solver.step0 must be positive");
  need(armijo > 0 && armijo < 1, "solver.armijo must lie in (0, 1)");
  need(shrink > 0 && shrink < 1, "solver.shrink must lie in (0, 1)");
  need(path_points >= 3, "solver.path_points must be at least 3");
  need(path_iter > 0, "solver.path_iter must be positive");
  need(box_bound > 0, "solver.box_bound must be positive");
  need(newton_iter >= 0, "solver.newton_iter must be non-negative");
}

BumpGeometry BumpGeometry::centered(double length, double sbar) { return {sbar, 0.5 * length, 0.1 * length}; }

DiscreteState build_bump(const Mesh1D& mesh, double sbar, double xbar, double rho) {
  if (!(sbar > 0)) throw GeometryError("bump height sbar must be positive");
  if (!(rho > 0)) throw GeometryError("bump radius rho must be positive");
  if (!(xbar - 2 * rho > 0 && xbar + 2 * rho < mesh.length)) {
    throw GeometryError("bump support [xbar - 2 rho, xbar + 2 rho] = [" + num(xbar - 2 * rho) + ", " +
                        num(xbar + 2 * rho) + "] is not inside (0, " + num(mesh.length) + ")");
  }
  DiscreteState u = DiscreteState::zeros(mesh.n);
  for (std::size_t i = 0; i < mesh.n; ++i) {
    const double dist = std::abs(mesh.x(i) - xbar);
    if (dist <= rho) {
      u.u[i] = sbar;
    } else if (dist < 2 * rho) {
      u.u[i] = sbar * (2 * rho - dist) / rho;
    }
  }
  return u;
}

double lambda_star(const Selection& sel, double sbar, double xbar, double rho, const Mesh1D& mesh) {
  const DiscreteState bump = build_bump(mesh, sbar, xbar, rho);
  const double J = sel.potential(sbar);
  if (!(J > 0)) {
    throw HypothesisViolation("J_f(sbar) = " + num(J) + " is not positive at sbar = " +
                              num(sbar));
  }
  double grad_sq = 0.0;
  double prev = 0.0;
  for (double v : bump.u) {
    grad_sq += (v - prev) * (v - prev);
    prev = v;
  }
  grad_sq = (grad_sq + prev * prev) / mesh.h();
  return grad_sq / (2.0 * J * 2.0 * rho);
}

bool is_nonzero(const DiscreteState& u, const SolverOptions& opts, const Mesh1D& mesh) {
  double mx = 0.0;
  for (double v : u.u) mx = std::max(mx, std::abs(v));
  return mx >= 1e3 * opts.tol_mphi * mesh.h();
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Where f jumps down, J has a convex kink and phi a local valley in that
// coordinate. A node that would cross such a point stops on it.
class Kinks {
 public:
  explicit Kinks(const Selection& f) {
    for (double j : f.jumps()) {
      if (f.limit(j, Side::Left) > f.limit(j, Side::Right)) convex_.push_back(j);
    }
  }

  bool at_convex(double s) const { return std::binary_search(convex_.begin(), convex_.end(), s); }

  double clip(double from, double to) const {
    if (convex_.empty() || from == to) return to;
    if (to > from) {
      auto it = std::upper_bound(convex_.begin(), convex_.end(), from);
      return it != convex_.end() && *it < to ? *it : to;
    }
    auto it = std::lower_bound(convex_.begin(), convex_.end(), from);
    if (it == convex_.begin()) return to;
    --it;
    return *it > to ? *it : to;
  }

 private:
  std::vector<double> convex_;
};

// Distance (relative) within which the kink fallback of Newton pins a node to a jump.
constexpr double kPinRadius = 1e-2;

struct StepResult {
  bool accepted = false;
  double t = 0.0;
  double delta = 0.0;
};

// Backtracking line search along d from u. The trial point stops at convex
// kinks; acceptance is phi(x) - phi(u) <= armijo <r, x - u>.
StepResult line_search(const EnergyModel& m, const Kinks& kinks, std::vector<double>& u,
                       std::span<const double> r, std::span<const double> d, double t0,
                       const SolverOptions& opts, bool exact = true) {
  const std::size_t n = u.size();
  std::vector<double> p(n);
  for (double t = t0; t > 1e-14 * t0 && t > 1e-300; t *= opts.shrink) {
    for (std::size_t i = 0; i < n; ++i) p[i] = kinks.clip(u[i], u[i] + t * d[i]) - u[i];
    const double slope = dot(r, p);
    if (!(slope < 0)) continue;
    const double delta = m.energy_delta(u, p, 1.0, exact);
    if (delta < 0 && delta <= opts.armijo * slope) {
      for (std::size_t i = 0; i < n; ++i) u[i] += p[i];
      return {true, t, delta};
    }
  }
  return {};
}

// Sobolev descent direction -M^{-1} r, with nodes held on convex kinks when
// the residual there already vanishes.
std::vector<double> sobolev_direction(const EnergyModel& m, const Kinks& kinks, std::span<const double> u,
                                      std::span<const double> r) {
  std::vector<double> d = m.riesz(r);
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = r[i] == 0.0 && kinks.at_convex(u[i]) ? 0.0 : -d[i];
  }
  return d;
}

std::vector<double> euclidean_direction(const Kinks& kinks, std::span<const double> u, std::span<const double> r) {
  std::vector<double> d(r.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = r[i] == 0.0 && kinks.at_convex(u[i]) ? 0.0 : -r[i];
  return d;
}

// Damped Newton on the residual r(u) with tridiagonal Jacobian K/h - lambda h diag(f'(u)).
// Nodes flagged in `pinned` do not move. Merit is m_phi. Returns nothing if the
// iteration does not reach tol.
std::optional<std::vector<double>> newton_run(const EnergyModel& m, std::vector<double> u,
                                              const std::vector<bool>& pinned, const SolverOptions& opts) {
  const std::size_t n = u.size();
  const double h = m.mesh().h();
  const double lh = m.lambda() * h;
  const Selection& f = m.selection();
  Subgradient sg = m.min_norm_subgradient(u);
  for (int it = 0; it < opts.newton_iter; ++it) {
    if (sg.m_phi <= opts.tol_mphi) return u;
    std::vector<double> dl(n > 1 ? n - 1 : 0, -1.0 / h), du(dl), diag(n), step(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) {
        diag[i] = 1.0;
        if (i > 0) dl[i - 1] = 0.0;
        if (i + 1 < n) du[i] = 0.0;
        step[i] = 0.0;
      } else {
        diag[i] = 2.0 / h - lh * f.slope(u[i]);
        step[i] = -sg.r[i];
      }
    }
    const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(n), 1, dl.data(), diag.data(),
                                          du.data(), step.data(), static_cast<lapack_int>(n));
    if (info != 0) return std::nullopt;
    bool moved = false;
    std::vector<double> trial(n);
    for (double t = 1.0; t > 1e-8; t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + t * step[i];
      Subgradient s2 = m.min_norm_subgradient(trial);
      if (s2.m_phi < (1.0 - 1e-4 * t) * sg.m_phi) {
        u.swap(trial);
        sg = std::move(s2);
        moved = true;
        break;
      }
    }
    if (!moved) return std::nullopt;
  }
  if (sg.m_phi <= opts.tol_mphi) return u;
  return std::nullopt;
}

// Plain Newton first; if that fails, nodes close to a jump of f are put on the
// jump and held there, which finds critical points sitting on a kink of J.
std::optional<std::vector<double>> newton_polish(const EnergyModel& m, std::vector<double> u,
                                                 const SolverOptions& opts) {
  const std::size_t n = u.size();
  if (auto r = newton_run(m, u, std::vector<bool>(n, false), opts)) return r;
  const std::vector<double>& jumps = m.selection().jumps();
  if (jumps.empty()) return std::nullopt;
  std::vector<bool> pinned(n, false);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = std::lower_bound(jumps.begin(), jumps.end(), u[i]);
    double best = INFINITY, at = 0.0;
    for (auto c : {it, it == jumps.begin() ? it : it - 1}) {
      if (c != jumps.end() && std::abs(*c - u[i]) < best) {
        best = std::abs(*c - u[i]);
        at = *c;
      }
    }
    if (best <= kPinRadius * std::max(1.0, std::abs(at))) {
      u[i] = at;
      pinned[i] = true;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return newton_run(m, std::move(u), pinned, opts);
}

CriticalPoint finish(const EnergyModel& m, std::vector<double> u, int iterations, Status status, std::string diag,
                     std::vector<double> trace) {
  CriticalPoint cp;
  cp.energy = m.energy(u);
  cp.m_phi = m.min_norm_subgradient(u).m_phi;
  cp.u = DiscreteState(std::move(u));
  cp.iterations = iterations;
  cp.status = status;
  cp.diagnostic = std::move(diag);
  cp.trace = std::move(trace);
  return cp;
}

// Polishing starts once the residual is this small, and is retried at this interval.
constexpr double kPolishBelow = 1e-2;
constexpr int kPolishEvery = 20;

}  // namespace

CriticalPoint descend(const EnergyModel& m, DiscreteState start, const SolverOptions& opts) {
  opts.validate();
  if (start.size() != m.mesh().n) throw std::invalid_argument("start state does not match the mesh");
  const Kinks kinks(m.selection());
  std::vector<double> u = std::move(start.u);
  double E = m.energy(u);
  std::vector<double> trace{E};
  double t_prev = opts.step0;
  int last_polish = -kPolishEvery;

  for (int it = 0; it < opts.max_iter; ++it) {
    const Subgradient sg = m.min_norm_subgradient(u);
    if (sg.m_phi <= opts.tol_mphi) return finish(m, std::move(u), it, Status::Converged, "", std::move(trace));
    if (max_abs(u) > opts.box_bound) {
      return finish(m, std::move(u), it, Status::Stalled,
                    "iterate left the box |u_i| <= " + num(opts.box_bound) +
                        "; the energy may be unbounded below",
                    std::move(trace));
    }

    auto polish = [&]() -> std::optional<CriticalPoint> {
      last_polish = it;
      auto p = newton_polish(m, u, opts);
      if (!p) return std::nullopt;
      std::vector<double> step(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) step[i] = (*p)[i] - u[i];
      // A minimizer search must not climb to a different critical point.
      const double delta = m.energy_delta(u, step, 1.0);
      if (delta > 1e-13 * std::max(1.0, std::abs(E))) return std::nullopt;
      trace.push_back(E + std::min(delta, 0.0));
      return finish(m, std::move(*p), it + 1, Status::Converged, "", std::move(trace));
    };

    if (sg.m_phi < kPolishBelow && it - last_polish >= kPolishEvery) {
      if (auto cp = polish()) return std::move(*cp);
    }
    std::vector<double> d = sobolev_direction(m, kinks, u, sg.r);
    StepResult s = line_search(m, kinks, u, sg.r, d, std::min(opts.step0, 2.0 * t_prev), opts);
    if (!s.accepted) {
      d = euclidean_direction(kinks, u, sg.r);
      s = line_search(m, kinks, u, sg.r, d, opts.step0, opts);
    }
    if (s.accepted) {
      t_prev = s.t;
      E += s.delta;
      trace.push_back(E);
      continue;
    }
    if (last_polish != it) {
      if (auto cp = polish()) return std::move(*cp);
    }
    return finish(m, std::move(u), it, Status::Stalled,
                  "no descent step along the min-norm direction (m_phi = " + num(sg.m_phi) + ")",
                  std::move(trace));
  }
  return finish(m, std::move(u), opts.max_iter, Status::MaxIter, "iteration limit reached", std::move(trace));
}

std::vector<DiscreteState> default_starts(const Mesh1D& mesh, const BumpGeometry& g, std::uint64_t seed) {
  std::vector<DiscreteState> starts;
  starts.push_back(DiscreteState::zeros(mesh.n));
  try {
    DiscreteState b = build_bump(mesh, g);
    DiscreteState nb = b;
    for (double& v : nb.u) v = -v;
    starts.push_back(std::move(b));
    starts.push_back(std::move(nb));
  } catch (const GeometryError&) {
    // A bump that does not fit only removes two starts.
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0 * g.sbar, 2.0 * g.sbar);
  for (int k = 0; k < 3; ++k) {
    DiscreteState s = DiscreteState::zeros(mesh.n);
    for (double& v : s.u) v = dist(rng);
    starts.push_back(std::move(s));
  }
  return starts;
}

CriticalPoint minimize_global(const EnergyModel& m, const std::vector<DiscreteState>& starts,
                              const SolverOptions& opts) {
  if (starts.empty()) throw std::invalid_argument("minimize_global needs at least one start");
  std::optional<CriticalPoint> best_conv, best_any;
  for (const DiscreteState& s : starts) {
    CriticalPoint cp = descend(m, s, opts);
    if (cp.status == Status::Converged) {
      if (!best_conv || cp.energy < best_conv->energy) best_conv = cp;
    } else if (!best_any || cp.energy < best_any->energy) {
      best_any = std::move(cp);
    }
  }
  return best_conv ? std::move(*best_conv) : std::move(*best_any);
}

// ---------------------------------------------------------------- mountain pass

namespace {

std::vector<double> scaled(std::span<const double> v, double t) {
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x *= t;
  return out;
}

// Re-spaces interior images to equal H^1 arclength by linear interpolation.
std::vector<std::vector<double>> equalize(const EnergyModel& m, const std::vector<std::vector<double>>& path) {
  const std::size_t P = path.size();
  const std::size_t n = path.front().size();
  std::vector<double> cum(P, 0.0);
  std::vector<double> diff(n);
  for (std::size_t j = 1; j < P; ++j) {
    for (std::size_t i = 0; i < n; ++i) diff[i] = path[j][i] - path[j - 1][i];
    cum[j] = cum[j - 1] + m.h1_norm(diff);
  }
  const double total = cum.back();
  if (!(total > 0)) return path;
  std::vector<std::vector<double>> out(path);
  std::size_t seg = 1;
  for (std::size_t k = 1; k + 1 < P; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(P - 1);
    while (seg + 1 < P && cum[seg] < target) ++seg;
    const double len = cum[seg] - cum[seg - 1];
    const double a = len > 0 ? (target - cum[seg - 1]) / len : 0.0;
    for (std::size_t i = 0; i < n; ++i) out[k][i] = (1.0 - a) * path[seg - 1][i] + a * path[seg][i];
  }
  return out;
}

struct PolylineTop {
  double energy = -std::numeric_limits<double>::infinity();
  std::size_t image = 0;  // image nearest to the maximum
  std::vector<double> u;
};

constexpr int kSegmentSamples = 8;  // samples per path segment, endpoints included once
constexpr double kMaxKappa = 0.5;   // image step cap as a fraction of the spacing
constexpr double kMinKappa = 1e-6;

}  // namespace

MountainPass mountain_pass(const EnergyModel& m, const DiscreteState& u_far, const SolverOptions& opts) {
  opts.validate();
  const std::size_t n = m.mesh().n;
  if (u_far.size() != n) throw std::invalid_argument("far endpoint does not match the mesh");
  if (!(m.h1_norm(u_far.u) > 0)) throw GeometryError("far endpoint is zero");
  const std::vector<double> zero(n, 0.0);
  const double E0 = m.energy(zero);
  const double E1 = m.energy(u_far.u);
  const double low = std::max(E0, E1);

  // Scan the ray on a log scale so a barrier much closer to 0 than u_far is seen.
  constexpr int kScan = 160;
  std::vector<double> ts, Es;
  for (int k = kScan; k >= 0; --k) {
    const double t = std::exp2(-0.25 * k);
    ts.push_back(t);
    Es.push_back(m.energy(scaled(u_far.u, t)));
  }
  const auto peak = static_cast<std::size_t>(std::max_element(Es.begin(), Es.end()) - Es.begin());
  const double scale = std::max(1.0, std::abs(low));
  if (peak + 1 == ts.size() || !(Es[peak] > low + 1e-14 * scale)) {
    throw GeometryError("no energy barrier on the segment from 0 to the far endpoint");
  }
  std::size_t end = peak + 1;
  while (end + 1 < ts.size() && Es[end] > low) ++end;
  const std::vector<double> e = scaled(u_far.u, ts[end]);
  const double E_end = m.energy(e);

  MountainPass out;
  out.endpoint_energy = E_end;
  out.radius = 0.5 * ts[peak] * m.h1_norm(u_far.u);
  {
    std::vector<std::vector<double>> dirs{u_far.u};
    for (int k = 1; k <= 3; ++k) {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(k * M_PI * m.mesh().x(i) / m.mesh().length);
      dirs.push_back(std::move(v));
    }
    std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int k = 0; k < 4; ++k) {
      std::vector<double> v(n);
      for (double& x : v) x = dist(rng);
      dirs.push_back(std::move(v));
    }
    out.eta_r = std::numeric_limits<double>::infinity();
    for (const auto& v : dirs) {
      const double nv = m.h1_norm(v);
      if (!(nv > 0)) continue;
      for (double sign : {1.0, -1.0}) out.eta_r = std::min(out.eta_r, m.energy(scaled(v, sign * out.radius / nv)));
    }
  }
  if (!(out.eta_r > std::max(E0, E_end))) {
    throw GeometryError("sampled sphere energy eta_r = " + num(out.eta_r) +
                        " does not exceed the endpoint energies");
  }

  // String of images from 0 to e; endpoints stay fixed.
  const std::size_t P = static_cast<std::size_t>(opts.path_points);
  std::vector<std::vector<double>> path(P);
  for (std::size_t j = 0; j < P; ++j) path[j] = scaled(e, static_cast<double>(j) / static_cast<double>(P - 1));
  std::vector<double> energies(P);
  for (std::size_t j = 0; j < P; ++j) energies[j] = m.energy(path[j]);
  std::vector<double> tstep(P, opts.step0);
  const Kinks kinks(m.selection());
  const double barrier_floor = std::max(E0, E_end);

  // The piecewise-linear path is an admissible path, so its maximum bounds the
  // mountain-pass level from above; the images alone can straddle the ridge.
  auto top_of = [&](const std::vector<std::vector<double>>& pth, const std::vector<double>& E) {
    PolylineTop t;
    std::vector<double> x(n);
    for (std::size_t j = 0; j < P; ++j) {
      if (E[j] > t.energy) t = {E[j], j, pth[j]};
      if (j + 1 == P) break;
      for (int k = 1; k < kSegmentSamples; ++k) {
        const double a = static_cast<double>(k) / kSegmentSamples;
        for (std::size_t i = 0; i < n; ++i) x[i] = (1.0 - a) * pth[j][i] + a * pth[j + 1][i];
        const double Ex = m.energy(x);
        if (Ex > t.energy) t = {Ex, a < 0.5 ? j : j + 1, x};
      }
    }
    return t;
  };

  auto accept = [&](const std::vector<double>& cand, double path_top) -> std::optional<CriticalPoint> {
    const double Ec = m.energy(cand);
    if (!(Ec > barrier_floor) || Ec < out.eta_r - opts.tol_mphi) return std::nullopt;
    // The sampled path maximum sits a little below the true one; anything far
    // above it is a different, higher critical point.
    if (Ec > path_top + 1e-2 * (path_top - barrier_floor)) return std::nullopt;
    if (!is_nonzero(DiscreteState(cand), opts, m.mesh())) return std::nullopt;
    return finish(m, cand, 0, Status::Converged, "", {});
  };
  auto done = [&](CriticalPoint cp, int it) {
    out.point = std::move(cp);
    out.point.iterations = it;
    out.point.trace = out.path_max;
    return out;
  };

  PolylineTop top = top_of(path, energies);
  out.path_max.push_back(top.energy);
  double kappa = kMaxKappa;
  std::vector<double> diff(n), tau(n);
  for (int it = 0; it < opts.path_iter; ++it) {
    double spacing = 0.0;
    for (std::size_t j = 1; j < P; ++j) {
      for (std::size_t i = 0; i < n; ++i) diff[i] = path[j][i] - path[j - 1][i];
      spacing += m.h1_norm(diff);
    }
    spacing /= static_cast<double>(P - 1);

    // Tangent-free descent of every interior image, steps capped at kappa * spacing.
    std::vector<std::vector<double>> moved(path);
    std::vector<double> moved_E(energies);
    std::vector<double> moved_t(tstep);
    bool any_moved = false;
    for (std::size_t j = 1; j + 1 < P; ++j) {
      const Subgradient sg = m.min_norm_subgradient(path[j]);
      std::vector<double> d = sobolev_direction(m, kinks, path[j], sg.r);
      for (std::size_t i = 0; i < n; ++i) tau[i] = path[j + 1][i] - path[j - 1][i];
      const double tn = m.h1_norm(tau);
      if (tn > 0) {
        const double c = m.h1_dot(d, tau) / (tn * tn);
        for (std::size_t i = 0; i < n; ++i) d[i] -= c * tau[i];
      }
      const double dn = m.h1_norm(d);
      const double cap = dn > 0 ? kappa * spacing / dn : opts.step0;
      const double t0 = std::min({opts.step0, 2.0 * tstep[j], cap});
      const StepResult s = line_search(m, kinks, moved[j], sg.r, d, t0, opts, false);
      if (s.accepted) {
        moved_t[j] = s.t;
        moved_E[j] += s.delta;
        any_moved = true;
      }
    }

    // Keep whichever of {equalized, as moved} does not raise the path maximum.
    bool accepted = false;
    if (any_moved) {
      std::vector<std::vector<double>> eq = equalize(m, moved);
      std::vector<double> eq_E(P);
      for (std::size_t j = 0; j < P; ++j) eq_E[j] = m.energy(eq[j]);
      PolylineTop t_eq = top_of(eq, eq_E);
      if (t_eq.energy <= top.energy) {
        path.swap(eq);
        energies.swap(eq_E);
        top = std::move(t_eq);
        accepted = true;
      } else {
        PolylineTop t_mv = top_of(moved, moved_E);
        if (t_mv.energy <= top.energy) {
          path.swap(moved);
          energies.swap(moved_E);
          top = std::move(t_mv);
          accepted = true;
        }
      }
    }
    if (accepted) {
      tstep.swap(moved_t);
      kappa = std::min(kMaxKappa, 1.5 * kappa);
    } else {
      kappa *= 0.5;
    }
    out.path_max.push_back(top.energy);

    const bool stuck = kappa < kMinKappa;
    if (m.min_norm_subgradient(top.u).m_phi <= opts.tol_mphi) {
      if (auto cp = accept(top.u, top.energy)) return done(std::move(*cp), it + 1);
    }
    if (it % kPolishEvery == kPolishEvery - 1 || stuck) {
      for (const std::vector<double>* start : {&top.u, &path[top.image]}) {
        if (auto polished = newton_polish(m, *start, opts)) {
          if (auto cp = accept(*polished, top.energy)) return done(std::move(*cp), it + 1);
        }
      }
    }
    if (stuck) {
      return done(finish(m, top.u, it + 1, Status::Stalled,
                         "path stopped improving before its highest point became critical", {}),
                  it + 1);
    }
  }
  return done(finish(m, top.u, opts.path_iter, Status::MaxIter, "path iteration limit reached", {}),
              opts.path_iter);
}

TwoSolutions solve_two(const EnergyModel& m, const BumpGeometry& g, const SolverOptions& opts) {
  opts.validate();
  TwoSolutions out;
  try {
    out.lambda_star = lambda_star(m.selection(), g, m.mesh());
    if (m.lambda() < *out.lambda_star) {
      out.warnings.push_back("theorem hypotheses unmet: lambda = " + num(m.lambda()) +
                             " is below lambda* = " + num(*out.lambda_star));
    }
  } catch (const Error& e) {
    out.warnings.push_back(std::string("theorem hypotheses unmet: ") + e.what());
  }

  out.u1 = minimize_global(m, default_starts(m.mesh(), g, opts.seed), opts);

  const bool u1_usable = out.u1.status == Status::Converged && out.u1.energy < 0 &&
                         is_nonzero(out.u1.u, opts, m.mesh());
  DiscreteState u_far;
  if (u1_usable) {
    u_far = out.u1.u;
  } else {
    try {
      u_far = build_bump(m.mesh(), g);
    } catch (const GeometryError& e) {
      out.warnings.push_back(std::string("mountain pass skipped: ") + e.what());
    }
  }

  if (u_far.size() == m.mesh().n) {
    try {
      MountainPass mp = mountain_pass(m, u_far, opts);
      out.u2 = std::move(mp.point);
      out.eta_r = mp.eta_r;
    } catch (const GeometryError& e) {
      out.warnings.push_back(std::string("mountain pass failed: ") + e.what());
    }
  }
  if (out.u2.u.size() != m.mesh().n) {
    out.u2 = finish(m, std::vector<double>(m.mesh().n, 0.0), 0, Status::Stalled, "no mountain-pass point", {});
  }

  out.multiplicity = out.u1.status == Status::Converged && out.u2.status == Status::Converged &&
                     is_nonzero(out.u1.u, opts, m.mesh()) && is_nonzero(out.u2.u, opts, m.mesh()) &&
                     max_diff(out.u1.u.u, out.u2.u.u) >= 1e3 * opts.tol_mphi * m.mesh().h();
  return out;
}

}  // namespace dincl
