#pragma once

// Certificates that a discrete state solves the inclusion in weak form:
// K u / h = lambda h w with w_i in F(u_i).

#include <cstddef>
#include <vector>

#include "dincl/discretize.hpp"

namespace dincl {

struct Certificate {
  double residual_norm = 0.0;    // ||g - lambda h w||, equal to m_phi
  double inclusion_slack = 0.0;  // max_i dist(w_i, F(u_i))
  double shrink_slack = 0.0;     // max_i dist(w_i, [f-(u_i), f+(u_i)])
  std::vector<double> w;
  double tol = 0.0;
  bool verdict = false;  // residual_norm <= tol and inclusion_slack <= tol
  // False when w sits in the envelope interval but not in F, i.e.
  // [f-, f+] is not inside F somewhere (F not u.s.c. there).
  bool consistent = true;
  // Nodes where f- < f+. There the equation -u'' = lambda f(u) need not hold
  // even though the inclusion does.
  std::size_t set_valued_nodes = 0;
};

// The clamped multiplier of the min-norm subgradient.
std::vector<double> extract_w(const EnergyModel& m, const DiscreteState& u);

// Throws std::invalid_argument unless tol > 0.
Certificate certify(const EnergyModel& m, const DiscreteState& u, double tol);

}  // namespace dincl
