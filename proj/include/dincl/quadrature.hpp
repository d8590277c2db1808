#pragma once

#include <functional>
#include <span>

#include "dincl/interval.hpp"

namespace dincl {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // accumulated Richardson estimate
  long evaluations = 0;
};

// Adaptive Simpson on [a, b] for an integrand continuous on the open interval.
// `fa` and `fb` are the one-sided limits at the ends, so the integrand's
// own values at a and b (which may be isolated point values) never enter.
// Throws QuadratureError when a panel fails to meet the tolerance at max depth.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            double fa, double fb, double tol, int max_depth = 48);

// Integrand with finitely many jump points; `limit` gives one-sided limits.
struct PiecewiseIntegrand {
  std::function<double(double)> value;
  std::function<double(double, Side)> limit;
};

// Oriented integral from `from` to `to`, split at every jump strictly inside.
// `jumps` must be sorted ascending.
QuadResult integrate_piecewise(const PiecewiseIntegrand& g, double from, double to,
                               std::span<const double> jumps, double tol);

}  // namespace dincl
