#include "dincl/selection.hpp"

#include <algorithm>
#include <cmath>

#include "dincl/error.hpp"
#include "dincl/quadrature.hpp"

namespace dincl {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Min: return "min";
    case Strategy::Max: return "max";
    case Strategy::Midpoint: return "midpoint";
    case Strategy::SignSwitch: return "signswitch";
    case Strategy::TheoremApp: return "theorem_app";
    case Strategy::Custom: return "custom";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& name) {
  for (Strategy s : {Strategy::Min, Strategy::Max, Strategy::Midpoint, Strategy::SignSwitch,
                     Strategy::TheoremApp, Strategy::Custom}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown selection strategy '" + name + "'");
}

Selection::Selection(std::shared_ptr<const IntervalMap> map, Strategy strategy, double sbar,
                     std::optional<Expr> custom, std::vector<double> extra_jumps)
    : map_(std::move(map)), strategy_(strategy), sbar_(sbar), custom_(std::move(custom)) {
  if (!map_) throw std::invalid_argument("selection needs a map");
  if (strategy_ == Strategy::Custom && !custom_) throw std::invalid_argument("custom selection needs an expression");
  if (strategy_ == Strategy::TheoremApp && !(sbar_ > 0)) throw std::invalid_argument("theorem_app needs sbar > 0");

  jumps_ = map_->jumps();
  switch (strategy_) {
    case Strategy::SignSwitch: jumps_.push_back(0.0); break;
    case Strategy::TheoremApp:
      jumps_.insert(jumps_.end(), {-sbar_, 0.0, sbar_});
      break;
    case Strategy::Custom: jumps_.insert(jumps_.end(), extra_jumps.begin(), extra_jumps.end()); break;
    default: break;
  }
  std::sort(jumps_.begin(), jumps_.end());
  jumps_.erase(std::unique(jumps_.begin(), jumps_.end()), jumps_.end());
}

double Selection::pick(const Interval& F, double s, std::optional<Side> side) const {
  // Position tests for s itself, or for points just left/right of s.
  auto at_most = [&](double c) { return side == Side::Right ? s < c : s <= c; };
  auto below = [&](double c) { return side == Side::Left ? s <= c : s < c; };
  switch (strategy_) {
    case Strategy::Min: return F.lo;
    case Strategy::Max: return F.hi;
    case Strategy::Midpoint: return 0.5 * (F.lo + F.hi);
    case Strategy::SignSwitch: return below(0.0) ? F.hi : F.lo;
    case Strategy::TheoremApp:
      if (at_most(-sbar_)) return F.hi;
      if (at_most(0.0)) return F.lo;
      if (at_most(sbar_)) return F.hi;
      return F.lo;
    case Strategy::Custom: break;
  }
  return NAN;
}

double Selection::custom_value(double x) const {
  const double v = (*custom_)(x);
  const Interval F = (*map_)(x);
  if (!F.contains(v, 1e-12 * std::max(1.0, std::abs(v)))) {
    throw SelectionViolation("custom selection '" + custom_->str() + "' = " + std::to_string(v) +
                             " leaves F(" + std::to_string(x) + ") = [" + std::to_string(F.lo) + ", " +
                             std::to_string(F.hi) + "]");
  }
  return v;
}

double Selection::operator()(double s) const {
  if (strategy_ == Strategy::Custom) return custom_value(s);
  return pick((*map_)(s), s, std::nullopt);
}

double Selection::limit(double s, Side side) const {
  if (strategy_ != Strategy::Custom) return pick(map_->limit(s, side), s, side);
  if (!std::binary_search(jumps_.begin(), jumps_.end(), s)) return (*custom_)(s);
  const double d = std::ldexp(std::max(1.0, std::abs(s)), -20);
  const double dir = side == Side::Left ? -1.0 : 1.0;
  return 2.0 * (*custom_)(s + dir * 0.5 * d) - (*custom_)(s + dir * d);
}

Interval Selection::essential_limits(double s) const {
  const double l = limit(s, Side::Left);
  const double r = limit(s, Side::Right);
  return {std::min(l, r), std::max(l, r)};
}

double Selection::potential(double s, double tol) const {
  if (s == 0.0) return 0.0;
  PiecewiseIntegrand g{[this](double x) { return (*this)(x); },
                       [this](double x, Side side) { return limit(x, side); }};
  return integrate_piecewise(g, 0.0, s, jumps_, tol).value;
}

double Selection::slope(double s) const {
  const double hd = 1e-6 * std::max(1.0, std::abs(s));
  auto first = std::lower_bound(jumps_.begin(), jumps_.end(), s - hd);
  const bool jump_in_window = first != jumps_.end() && *first <= s + hd;
  if (!jump_in_window) return ((*this)(s + hd) - (*this)(s - hd)) / (2.0 * hd);
  const double j = *first;
  if (j > s) return (limit(s, Side::Left) - limit(s - hd, Side::Left)) / hd;
  return (limit(s + hd, Side::Right) - limit(s, Side::Right)) / hd;
}

// ---------------------------------------------------------------- PotentialTable

PotentialTable::PotentialTable(std::shared_ptr<const Selection> sel, double a, double b, std::size_t n, double tol)
    : sel_(std::move(sel)), a_(a), b_(b), tol_(tol), n_(n) {
  if (!sel_) throw std::invalid_argument("potential table needs a selection");
  if (!(a < 0.0 && 0.0 < b)) throw std::invalid_argument("potential table range must straddle 0");
  if (n < 2) throw std::invalid_argument("potential table needs at least 2 nodes");
  if (!(tol > 0)) throw std::invalid_argument("potential table tol must be positive");
  dx_ = (b - a) / static_cast<double>(n - 1);

  // Uniform nodes, plus 0 and every jump inside (a, b) as extra knots.
  std::vector<double> extra{0.0};
  for (double j : sel_->jumps()) {
    if (j > a && j < b) extra.push_back(j);
  }
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());

  const Selection& f = *sel_;
  auto make_knot = [&](double s) { return Knot{s, 0.0, f.limit(s, Side::Left), f.limit(s, Side::Right)}; };

  std::size_t e = 0;
  cell_first_.reserve(n);
  knots_.reserve(n + extra.size());
  for (std::size_t j = 0; j < n; ++j) {
    const double x = j + 1 == n ? b : a + dx_ * static_cast<double>(j);
    while (e < extra.size() && extra[e] < x) knots_.push_back(make_knot(extra[e++]));
    if (e < extra.size() && extra[e] == x) ++e;
    cell_first_.push_back(knots_.size());
    knots_.push_back(make_knot(x));
  }

  const auto zero = std::find_if(knots_.begin(), knots_.end(), [](const Knot& k) { return k.s == 0.0; });
  const std::size_t k0 = static_cast<std::size_t>(zero - knots_.begin());
  const double width = b - a;
  auto f_inside = [&f](double x) { return f(x); };
  auto cell = [&](std::size_t k) {
    const Knot& l = knots_[k];
    const Knot& r = knots_[k + 1];
    return adaptive_simpson(f_inside, l.s, r.s, l.slope_right, r.slope_left, tol * (r.s - l.s) / width);
  };

  knots_[k0].J = 0.0;
  for (std::size_t k = k0; k + 1 < knots_.size(); ++k) {
    const QuadResult q = cell(k);
    knots_[k + 1].J = knots_[k].J + q.value;
    quad_error_ += q.error;
  }
  for (std::size_t k = k0; k > 0; --k) {
    const QuadResult q = cell(k - 1);
    knots_[k - 1].J = knots_[k].J - q.value;
    quad_error_ += q.error;
  }

  for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
    const Knot& l = knots_[k];
    const double mid = 0.5 * (l.s + knots_[k + 1].s);
    const double direct =
        l.J + adaptive_simpson(f_inside, l.s, mid, l.slope_right, f(mid), tol * (mid - l.s) / width).value;
    interp_error_ = std::max(interp_error_, std::abs(direct - hermite(k, mid)));
  }
}

std::size_t PotentialTable::locate(double s) const {
  const double pos = std::floor((s - a_) / dx_);
  const std::size_t j = std::min(n_ - 2, static_cast<std::size_t>(std::max(0.0, pos)));
  std::size_t k = cell_first_[j];
  while (k > 0 && knots_[k].s > s) --k;
  while (k + 2 < knots_.size() && knots_[k + 1].s < s) ++k;
  return k;
}

double PotentialTable::hermite(std::size_t k, double s) const {
  const Knot& l = knots_[k];
  const Knot& r = knots_[k + 1];
  const double h = r.s - l.s;
  const double t = (s - l.s) / h;
  const double u = 1.0 - t;
  return (1.0 + 2.0 * t) * u * u * l.J + t * u * u * h * l.slope_right + t * t * (3.0 - 2.0 * t) * r.J -
         t * t * u * h * r.slope_left;
}

double PotentialTable::operator()(double s) const {
  if (s < a_ || s > b_) {
    const Knot& edge = s < a_ ? knots_.front() : knots_.back();
    PiecewiseIntegrand g{[this](double x) { return (*sel_)(x); },
                         [this](double x, Side side) { return sel_->limit(x, side); }};
    return edge.J + integrate_piecewise(g, edge.s, s, sel_->jumps(), tol_).value;
  }
  return hermite(locate(s), s);
}

}  // namespace dincl
