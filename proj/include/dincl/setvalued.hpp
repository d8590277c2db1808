#pragma once

// Set-valued maps F(s) = [lo(s), hi(s)] with compact convex interval values,
// and sampled certificates for the structural hypotheses placed on them.

#include <map>
#include <string>
#include <vector>

#include "dincl/expr.hpp"
#include "dincl/interval.hpp"

namespace dincl {

// Scalar function given by one expression per open interval between
// consecutive breakpoints (plus the two unbounded tails). At a breakpoint the
// value is the right branch's limit unless an explicit point value is given.
class PiecewiseFn {
 public:
  PiecewiseFn(std::vector<double> breaks, std::vector<Expr> branches,
              std::map<double, double> point_values = {});

  static PiecewiseFn constant(double c);

  double operator()(double s) const;

  // One-sided limit at s; ignores point values.
  double limit(double s, Side side) const;

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<Expr>& branches() const { return branches_; }
  const std::map<double, double>& point_values() const { return point_values_; }

  // Breakpoints together with the locations of point values, sorted.
  std::vector<double> jump_points() const;

  // Evaluate every branch on a sample grid of its interval clipped to [from, to];
  // throws InvalidMap naming the branch on a domain error.
  void validate(double from, double to) const;

 private:
  std::size_t branch_index(double s, Side side) const;

  std::vector<double> breaks_;
  std::vector<Expr> branches_;
  std::map<double, double> point_values_;
};

// F(s) = [lo(s), hi(s)]. When `odd` is set only s >= 0 is stored and
// F(s) = -F(-s) for s < 0.
class IntervalMap {
 public:
  IntervalMap(PiecewiseFn lo, PiecewiseFn hi, bool odd = false);

  static IntervalMap constant(double lo, double hi);

  Interval operator()(double s) const;
  Interval limit(double s, Side side) const;

  const PiecewiseFn& lo() const { return lo_; }
  const PiecewiseFn& hi() const { return hi_; }
  bool odd() const { return odd_; }

  // Sorted points where F may be discontinuous (mirrored for odd maps).
  const std::vector<double>& jumps() const { return jumps_; }

  // Half-width of the window that covers every jump with margin; used as the
  // default extent of sample grids.
  double extent() const { return extent_; }

 private:
  PiecewiseFn lo_;
  PiecewiseFn hi_;
  bool odd_;
  std::vector<double> jumps_;
  double extent_ = 10.0;
};

inline Interval eval_F(const IntervalMap& F, double s) { return F(s); }

// p in (1, 2*), 2* = +inf in one dimension.
struct GrowthBound {
  double a = 0.0;
  double p = 2.0;
};

struct UscViolation {
  double s = 0.0;
  std::string kind;  // "min_not_lsc", "max_not_usc", "nonconvergent_limit", "order"
  std::string detail;
};

struct UscReport {
  bool ok = true;
  std::vector<UscViolation> violations;
  int points_checked = 0;
};

// Characterization of u.s.c. for interval-valued maps: min F l.s.c. and max F u.s.c.
// One-sided limits at every jump come from sampling at s0 +- 2^-k, k = kmin..kmax.
UscReport check_usc(const IntervalMap& F, double tol = 1e-6, int kmin = 10, int kmax = 40);

struct GrowthFit {
  GrowthBound bound;
  double argmax = 0.0;     // sample where the ratio is largest
  bool within_cap = true;  // a <= cap
};

// Smallest a with max(|lo|, |hi|) <= a (1 + |s|^(p-1)) on the sample grid
// (uniform grid plus every jump in range). A sampled certificate, not a proof.
GrowthFit check_growth(const IntervalMap& F, double p, Interval range, int n_samples,
                       double cap = 1e6);

// Oriented Aumann integral over [0, s]: the interval between the integrals of the
// extremal selections min F and max F.
Interval aumann(const IntervalMap& F, double s, double tol = 1e-10);

struct HypothesisResult {
  bool pass = false;
  double value = 0.0;  // the sampled quantity the verdict is based on
  std::string detail;
};

struct HypothesisGrid {
  double tol = 1e-6;
  int zero_kmin = 4;    // (zero): s = +-2^-k
  int zero_kmax = 40;
  int inf_kmin = 1;     // (inf): s = +-2^k
  int inf_kmax = 40;
  int tail = 8;         // samples in the monotone-trend window
  int ss_samples = 1000;
};

struct HypothesisReport {
  HypothesisResult zero;  // max xi/s -> 0 as s -> 0
  HypothesisResult inf;   // limsup min xi/s <= 0 as |s| -> inf
  HypothesisResult ss;    // max F > 0 on (0, sbar]
  bool all() const { return zero.pass && inf.pass && ss.pass; }
};

HypothesisReport check_hypotheses(const IntervalMap& F, double sbar, const HypothesisGrid& grid = {});

}  // namespace dincl
