#include "dincl/setvalued.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dincl/error.hpp"
#include "dincl/quadrature.hpp"

namespace dincl {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// Values of F at s0 -+ 2^-k * scale for k = kmin..kmax, approaching from `side`.
std::vector<Interval> approach(const IntervalMap& F, double s0, Side side, int kmin, int kmax) {
  const double scale = std::max(1.0, std::abs(s0));
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(kmax - kmin + 1));
  for (int k = kmin; k <= kmax; ++k) {
    const double d = std::ldexp(scale, -k);
    out.push_back(F(side == Side::Left ? s0 - d : s0 + d));
  }
  return out;
}

bool converged(const std::vector<Interval>& seq, double Interval::*end, double tol) {
  const double last = seq.back().*end;
  const std::size_t window = std::min<std::size_t>(7, seq.size());
  for (std::size_t i = seq.size() - window; i < seq.size(); ++i) {
    if (std::abs(seq[i].*end - last) > tol) return false;
  }
  return true;
}

bool non_increasing(const std::vector<double>& v, std::size_t tail) {
  const std::size_t start = v.size() > tail ? v.size() - tail : 0;
  for (std::size_t i = start + 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + 1e-12) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------- PiecewiseFn

PiecewiseFn::PiecewiseFn(std::vector<double> breaks, std::vector<Expr> branches,
                         std::map<double, double> point_values)
    : breaks_(std::move(breaks)), branches_(std::move(branches)), point_values_(std::move(point_values)) {
  if (branches_.size() != breaks_.size() + 1) {
    throw InvalidMap("piecewise function needs one branch more than breakpoints (" +
                     std::to_string(breaks_.size()) + " breaks, " + std::to_string(branches_.size()) +
                     " branches)");
  }
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    if (!std::isfinite(breaks_[i])) throw InvalidMap("non-finite breakpoint");
    if (i > 0 && !(breaks_[i] > breaks_[i - 1])) throw InvalidMap("breakpoints must be strictly increasing");
  }
  for (const auto& [s, v] : point_values_) {
    if (!std::isfinite(s) || !std::isfinite(v)) throw InvalidMap("non-finite point value");
  }
}

PiecewiseFn PiecewiseFn::constant(double c) {
  Expr e = c >= 0 ? Expr::literal(c) : Expr::negate(Expr::literal(-c));
  return PiecewiseFn({}, {e});
}

std::size_t PiecewiseFn::branch_index(double s, Side side) const {
  auto it = side == Side::Left ? std::lower_bound(breaks_.begin(), breaks_.end(), s)
                               : std::upper_bound(breaks_.begin(), breaks_.end(), s);
  return static_cast<std::size_t>(it - breaks_.begin());
}

double PiecewiseFn::operator()(double s) const {
  if (auto it = point_values_.find(s); it != point_values_.end()) return it->second;
  return branches_[branch_index(s, Side::Right)](s);
}

double PiecewiseFn::limit(double s, Side side) const {
  const Expr& br = branches_[branch_index(s, side)];
  try {
    return br(s);
  } catch (const DomainError&) {
    // Branch undefined at its own endpoint (e.g. ln(s) at 0): extrapolate from inside.
    const double d = std::ldexp(std::max(1.0, std::abs(s)), -24);
    const double dir = side == Side::Left ? -1.0 : 1.0;
    return 2.0 * br(s + dir * 0.5 * d) - br(s + dir * d);
  }
}

std::vector<double> PiecewiseFn::jump_points() const {
  std::vector<double> out = breaks_;
  for (const auto& kv : point_values_) out.push_back(kv.first);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void PiecewiseFn::validate(double from, double to) const {
  constexpr int kSamples = 33;
  for (std::size_t j = 0; j < branches_.size(); ++j) {
    const double left = j == 0 ? from : std::max(from, breaks_[j - 1]);
    const double right = j == breaks_.size() ? to : std::min(to, breaks_[j]);
    if (!(left < right)) continue;
    try {
      for (int i = 1; i < kSamples; ++i) branches_[j](left + (right - left) * i / kSamples);
      if (j > 0 && breaks_[j - 1] >= from && !point_values_.count(breaks_[j - 1])) branches_[j](breaks_[j - 1]);
    } catch (const DomainError& e) {
      throw InvalidMap("branch " + std::to_string(j) + " '" + branches_[j].str() + "': " + e.what());
    }
  }
}

// ---------------------------------------------------------------- IntervalMap

IntervalMap::IntervalMap(PiecewiseFn lo, PiecewiseFn hi, bool odd)
    : lo_(std::move(lo)), hi_(std::move(hi)), odd_(odd) {
  std::vector<double> pts = lo_.jump_points();
  for (double s : hi_.jump_points()) pts.push_back(s);
  if (odd_) {
    std::vector<double> mirrored{0.0};
    for (double s : pts) {
      if (s < 0) throw InvalidMap("odd maps store s >= 0 only; got breakpoint " + fmt(s));
      if (s > 0) {
        mirrored.push_back(s);
        mirrored.push_back(-s);
      }
    }
    pts = std::move(mirrored);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  jumps_ = std::move(pts);

  double reach = 1.0;
  for (double s : jumps_) reach = std::max(reach, std::abs(s));
  extent_ = std::max(10.0, 2.0 * reach);

  const double from = odd_ ? 0.0 : -extent_;
  lo_.validate(from, extent_);
  hi_.validate(from, extent_);

  auto check_order = [](const Interval& v, double s, const char* what) {
    if (!(v.lo <= v.hi)) {
      throw InvalidMap(std::string("lo > hi ") + what + " at s=" + fmt(s) + " ([" + fmt(v.lo) + ", " +
                       fmt(v.hi) + "])");
    }
  };
  constexpr int kGrid = 2000;
  for (int i = 0; i <= kGrid; ++i) {
    const double s = -extent_ + 2.0 * extent_ * i / kGrid;
    check_order((*this)(s), s, "");
  }
  for (double s : jumps_) {
    check_order((*this)(s), s, "");
    check_order(limit(s, Side::Left), s, "(left limit)");
    check_order(limit(s, Side::Right), s, "(right limit)");
  }
  if (odd_) {
    const double l0 = lo_(0.0);
    const double h0 = hi_(0.0);
    if (std::abs(l0 + h0) > 1e-12 * std::max(1.0, std::abs(h0))) {
      throw InvalidMap("odd map needs a symmetric value at 0, got [" + fmt(l0) + ", " + fmt(h0) + "]");
    }
  }
}

IntervalMap IntervalMap::constant(double lo, double hi) {
  return IntervalMap(PiecewiseFn::constant(lo), PiecewiseFn::constant(hi), false);
}

Interval IntervalMap::operator()(double s) const {
  if (odd_ && s < 0) return Interval{lo_(-s), hi_(-s)}.reflected();
  return {lo_(s), hi_(s)};
}

Interval IntervalMap::limit(double s, Side side) const {
  if (odd_ && (s < 0 || (s == 0 && side == Side::Left))) {
    const Side mirror = side == Side::Left ? Side::Right : Side::Left;
    return Interval{lo_.limit(-s, mirror), hi_.limit(-s, mirror)}.reflected();
  }
  return {lo_.limit(s, side), hi_.limit(s, side)};
}

// ---------------------------------------------------------------- checks

UscReport check_usc(const IntervalMap& F, double tol, int kmin, int kmax) {
  if (!(tol > 0)) throw std::invalid_argument("check_usc: tol must be positive");
  UscReport report;

  auto check_point = [&](double s0) {
    ++report.points_checked;
    const Interval at = F(s0);
    if (!(at.lo <= at.hi)) {
      report.violations.push_back({s0, "order", "lo > hi"});
      return;
    }
    const auto left = approach(F, s0, Side::Left, kmin, kmax);
    const auto right = approach(F, s0, Side::Right, kmin, kmax);
    for (const auto* seq : {&left, &right}) {
      if (!converged(*seq, &Interval::lo, tol) || !converged(*seq, &Interval::hi, tol)) {
        report.violations.push_back({s0, "nonconvergent_limit",
                                     std::string(seq == &left ? "left" : "right") +
                                         " limit does not settle (oscillating branch?)"});
        return;
      }
    }
    const double lo_lim = std::min(left.back().lo, right.back().lo);
    const double hi_lim = std::max(left.back().hi, right.back().hi);
    if (at.lo > lo_lim + tol) {
      report.violations.push_back(
          {s0, "min_not_lsc", "min F(s0)=" + fmt(at.lo) + " exceeds nearby limit " + fmt(lo_lim)});
    }
    if (at.hi < hi_lim - tol) {
      report.violations.push_back(
          {s0, "max_not_usc", "max F(s0)=" + fmt(at.hi) + " below nearby limit " + fmt(hi_lim)});
    }
  };

  for (double s : F.jumps()) check_point(s);
  constexpr int kGrid = 2000;
  const double w = F.extent();
  for (int i = 0; i <= kGrid; ++i) {
    const double s = -w + 2.0 * w * i / kGrid;
    if (std::binary_search(F.jumps().begin(), F.jumps().end(), s)) continue;
    check_point(s);
  }
  report.ok = report.violations.empty();
  return report;
}

GrowthFit check_growth(const IntervalMap& F, double p, Interval range, int n_samples, double cap) {
  if (!(p > 1)) throw std::invalid_argument("check_growth: p must exceed 1");
  if (n_samples < 2) throw std::invalid_argument("check_growth: need at least 2 samples");
  std::vector<double> grid;
  for (int i = 0; i < n_samples; ++i) grid.push_back(range.lo + range.width() * i / (n_samples - 1));
  for (double s : F.jumps()) {
    if (range.contains(s)) grid.push_back(s);
  }
  GrowthFit fit;
  fit.bound.p = p;
  for (double s : grid) {
    const Interval v = F(s);
    const double ratio = std::max(std::abs(v.lo), std::abs(v.hi)) / (1.0 + std::pow(std::abs(s), p - 1.0));
    if (ratio > fit.bound.a) {
      fit.bound.a = ratio;
      fit.argmax = s;
    }
  }
  fit.within_cap = fit.bound.a <= cap;
  return fit;
}

Interval aumann(const IntervalMap& F, double s, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("aumann: tol must be positive");
  PiecewiseIntegrand lo{[&F](double x) { return F(x).lo; },
                        [&F](double x, Side side) { return F.limit(x, side).lo; }};
  PiecewiseIntegrand hi{[&F](double x) { return F(x).hi; },
                        [&F](double x, Side side) { return F.limit(x, side).hi; }};
  const double i_lo = integrate_piecewise(lo, 0.0, s, F.jumps(), 0.5 * tol).value;
  const double i_hi = integrate_piecewise(hi, 0.0, s, F.jumps(), 0.5 * tol).value;
  return {std::min(i_lo, i_hi), std::max(i_lo, i_hi)};
}

HypothesisReport check_hypotheses(const IntervalMap& F, double sbar, const HypothesisGrid& grid) {
  if (!(sbar > 0)) throw std::invalid_argument("check_hypotheses: sbar must be positive");
  HypothesisReport rep;

  // (zero): max over xi in F(s) of xi/s along s = +-2^-k.
  {
    std::vector<double> seq;
    for (int k = grid.zero_kmin; k <= grid.zero_kmax; ++k) {
      double worst = 0.0;
      for (double sgn : {1.0, -1.0}) {
        const double s = sgn * std::ldexp(1.0, -k);
        const Interval v = F(s);
        worst = std::max(worst, std::abs(std::max(v.lo / s, v.hi / s)));
      }
      seq.push_back(worst);
    }
    rep.zero.value = seq.back();
    const bool trend = non_increasing(seq, static_cast<std::size_t>(grid.tail));
    rep.zero.pass = seq.back() <= grid.tol && trend;
    rep.zero.detail = "sampled |max xi/s| at s=+-2^-" + std::to_string(grid.zero_kmax) + " is " + fmt(seq.back()) +
                      (trend ? "" : "; tail not decreasing");
  }

  // (inf): limsup of min over xi in F(s) of xi/s along s = +-2^k.
  {
    std::vector<double> seq;
    try {
      for (int k = grid.inf_kmin; k <= grid.inf_kmax; ++k) {
        double worst = -INFINITY;
        for (double sgn : {1.0, -1.0}) {
          const double s = sgn * std::ldexp(1.0, k);
          const Interval v = F(s);
          worst = std::max(worst, std::min(v.lo / s, v.hi / s));
        }
        seq.push_back(worst);
      }
      rep.inf.value = seq.back();
      const auto tail_start = seq.end() - std::min<std::ptrdiff_t>(grid.tail, static_cast<std::ptrdiff_t>(seq.size()));
      const bool tail_nonpositive = *std::max_element(tail_start, seq.end()) <= 0.0;
      const bool trend = non_increasing(seq, static_cast<std::size_t>(grid.tail)) || tail_nonpositive;
      rep.inf.pass = seq.back() <= grid.tol && trend;
      rep.inf.detail = "sampled min xi/s at |s|=2^" + std::to_string(grid.inf_kmax) + " is " + fmt(seq.back()) +
                       (trend ? "" : "; tail not decreasing");
    } catch (const DomainError& e) {
      rep.inf.pass = false;
      rep.inf.value = NAN;
      rep.inf.detail = std::string("evaluation failed: ") + e.what();
    }
  }

  // (ss): max F(s) > 0 on a grid of (0, sbar].
  {
    double worst = INFINITY;
    double where = sbar;
    for (int j = 1; j <= grid.ss_samples; ++j) {
      const double s = sbar * j / grid.ss_samples;
      const double h = F(s).hi;
      if (h < worst) {
        worst = h;
        where = s;
      }
    }
    rep.ss.value = worst;
    rep.ss.pass = worst > 0.0;
    rep.ss.detail = "min of max F on (0, sbar] grid is " + fmt(worst) + " at s=" + fmt(where);
  }
  return rep;
}

}  // namespace dincl
