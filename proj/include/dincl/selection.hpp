#pragma once

// Borel selections f of an interval map F, their essential one-sided
// envelopes f-/f+, and the potential J_f(s) = integral of f over [0, s].

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dincl/expr.hpp"
#include "dincl/interval.hpp"
#include "dincl/setvalued.hpp"

namespace dincl {

enum class Strategy {
  Min,         // min F
  Max,         // max F
  Midpoint,    // (min F + max F) / 2
  SignSwitch,  // max F for s < 0, min F for s >= 0
  TheoremApp,  // max | min | max | min across -sbar, 0, sbar
  Custom,      // user expression, checked against [min F, max F]
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

class Selection {
 public:
  // `sbar` is used by TheoremApp only; `custom` by Custom only. `extra_jumps`
  // lists discontinuities of a custom expression the map does not know about.
  Selection(std::shared_ptr<const IntervalMap> map, Strategy strategy, double sbar = 1.0,
            std::optional<Expr> custom = std::nullopt, std::vector<double> extra_jumps = {});

  Strategy strategy() const { return strategy_; }
  double sbar() const { return sbar_; }
  const IntervalMap& map() const { return *map_; }
  std::shared_ptr<const IntervalMap> map_ptr() const { return map_; }
  const std::vector<double>& jumps() const { return jumps_; }

  // Throws SelectionViolation when a custom expression leaves [min F, max F].
  double operator()(double s) const;

  double limit(double s, Side side) const;

  // [f-(s), f+(s)]: the smaller and larger of the two one-sided limits. Point
  // values are a null set and never enter.
  Interval essential_limits(double s) const;

  // J_f(s) by adaptive Simpson split at every jump in [0, s].
  double potential(double s, double tol = 1e-10) const;

  // Finite-difference slope of f taken inside the smooth piece containing s.
  double slope(double s) const;

 private:
  // Picks the envelope value for position s (or s-/s+ when `side` is set).
  double pick(const Interval& F, double s, std::optional<Side> side) const;
  double custom_value(double x) const;

  std::shared_ptr<const IntervalMap> map_;
  Strategy strategy_;
  double sbar_;
  std::optional<Expr> custom_;
  std::vector<double> jumps_;
};

inline double eval_f(const Selection& sel, double s) { return sel(s); }
inline Interval essential_limits(const Selection& sel, double s) { return sel.essential_limits(s); }
inline double potential(const Selection& sel, double s, double tol = 1e-10) { return sel.potential(s, tol); }

// Cumulative table of J_f on [a, b] with cubic Hermite interpolation that uses
// f as slope data. Jumps of f inside the range are inserted as extra knots.
class PotentialTable {
 public:
  PotentialTable(std::shared_ptr<const Selection> sel, double a, double b, std::size_t n, double tol = 1e-10);

  // Interpolated J_f(s); outside [a, b] falls back to quadrature from the nearest edge.
  double operator()(double s) const;
  bool contains(double s) const { return s >= a_ && s <= b_; }

  double a() const { return a_; }
  double b() const { return b_; }
  std::size_t nodes() const { return n_; }
  std::size_t knots() const { return knots_.size(); }

  // Sum of per-cell quadrature error estimates.
  double quadrature_error() const { return quad_error_; }
  // Largest observed gap between the interpolant and direct quadrature at cell midpoints.
  double interpolation_error() const { return interp_error_; }

  const Selection& selection() const { return *sel_; }

 private:
  struct Knot {
    double s;
    double J;
    double slope_left;   // f(s-)
    double slope_right;  // f(s+)
  };

  std::size_t locate(double s) const;
  double hermite(std::size_t k, double s) const;

  std::shared_ptr<const Selection> sel_;
  double a_, b_, dx_, tol_;
  std::size_t n_;
  std::vector<Knot> knots_;
  std::vector<std::size_t> cell_first_;  // index into knots_ of uniform node j
  double quad_error_ = 0.0;
  double interp_error_ = 0.0;
};

inline PotentialTable build_table(std::shared_ptr<const Selection> sel, double a, double b, std::size_t n,
                                  double tol = 1e-10) {
  return PotentialTable(std::move(sel), a, b, n, tol);
}

}  // namespace dincl
