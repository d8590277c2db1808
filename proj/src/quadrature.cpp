#include "dincl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dincl/error.hpp"

namespace dincl {

namespace {

// Guards against a coarse first panel that happens to sample an oscillation symmetrically.
constexpr int kMinDepth = 2;

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;
  long evals = 0;
  double error = 0.0;

  static double panel(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  double recurse(double a, double fa, double m, double fm, double b, double fb, double whole,
                 double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    evals += 2;
    const double left = panel(a, fa, flm, m, fm);
    const double right = panel(m, fm, frm, b, fb);
    const double delta = left + right - whole;
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
    if (depth >= kMinDepth && (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= roundoff)) {
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    if (depth >= max_depth) {
      throw QuadratureError("adaptive Simpson did not converge on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]");
    }
    return recurse(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                            double fb, double tol, int max_depth) {
  if (a == b) return {};
  if (b < a) {
    QuadResult r = adaptive_simpson(f, b, a, fb, fa, tol, max_depth);
    r.value = -r.value;
    return r;
  }
  Simpson s{f, max_depth};
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  s.evals = 1;
  const double whole = Simpson::panel(a, fa, fm, b, fb);
  QuadResult r;
  r.value = s.recurse(a, fa, m, fm, b, fb, whole, tol, 0);
  r.error = s.error;
  r.evaluations = s.evals;
  return r;
}

QuadResult integrate_piecewise(const PiecewiseIntegrand& g, double from, double to,
                               std::span<const double> jumps, double tol) {
  if (from == to) return {};
  const double a = std::min(from, to);
  const double b = std::max(from, to);
  std::vector<double> knots{a};
  for (double j : jumps) {
    if (j > a && j < b) knots.push_back(j);
  }
  knots.push_back(b);

  QuadResult total;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double lo = knots[i];
    const double hi = knots[i + 1];
    const double share = tol * (hi - lo) / (b - a);
    QuadResult r = adaptive_simpson(g.value, lo, hi, g.limit(lo, Side::Right), g.limit(hi, Side::Left), share);
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations + 2;
  }
  if (to < from) total.value = -total.value;
  return total;
}

}  // namespace dincl
