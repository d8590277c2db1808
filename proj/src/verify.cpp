#include "dincl/verify.hpp"

#include <algorithm>
#include <stdexcept>

namespace dincl {

std::vector<double> extract_w(const EnergyModel& m, const DiscreteState& u) {
  return m.min_norm_subgradient(u.u).w;
}

Certificate certify(const EnergyModel& m, const DiscreteState& u, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("certificate tolerance must be positive");
  Subgradient sg = m.min_norm_subgradient(u.u);
  Certificate c;
  c.tol = tol;
  c.residual_norm = sg.m_phi;
  const Selection& f = m.selection();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double s = u.u[i];
    const Interval env = f.essential_limits(s);
    c.inclusion_slack = std::max(c.inclusion_slack, f.map()(s).distance(sg.w[i]));
    c.shrink_slack = std::max(c.shrink_slack, env.distance(sg.w[i]));
    if (env.lo < env.hi) ++c.set_valued_nodes;
  }
  c.w = std::move(sg.w);
  c.verdict = c.residual_norm <= tol && c.inclusion_slack <= tol;
  c.consistent = !(c.shrink_slack <= tol && c.inclusion_slack > tol);
  return c;
}

}  // namespace dincl
