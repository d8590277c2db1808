#pragma once

// Critical points of the discrete energy: a global minimizer by multistart
// descent, a mountain-pass point by path deformation, and the bump/lambda*
// construction that guarantees the minimizer has negative energy.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dincl/discretize.hpp"

namespace dincl {

enum class Status { Converged, MaxIter, Stalled };
std::string to_string(Status s);

struct SolverOptions {
  double tol_mphi = 1e-6;
  int max_iter = 20000;
  double step0 = 1.0;
  double armijo = 1e-4;
  double shrink = 0.5;
  int path_points = 41;
  std::uint64_t seed = 1;
  int path_iter = 4000;     // string iterations before giving up
  double box_bound = 1e8;   // |u_i| beyond this counts as escaping to infinity
  int newton_iter = 60;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct CriticalPoint {
  DiscreteState u;
  double energy = 0.0;
  double m_phi = 0.0;
  int iterations = 0;
  Status status = Status::MaxIter;
  std::string diagnostic;
  std::vector<double> trace;  // energy after every accepted step, starting value first
};

struct BumpGeometry {
  double sbar = 1.0;
  double xbar = 0.5;
  double rho = 0.1;

  // x̄ = L/2, ρ = L/10.
  static BumpGeometry centered(double length, double sbar);
};

// sbar on [xbar - rho, xbar + rho], linear to 0 at xbar +- 2 rho. Throws
// GeometryError unless [xbar - 2 rho, xbar + 2 rho] lies inside (0, L).
DiscreteState build_bump(const Mesh1D& mesh, double sbar, double xbar, double rho);
inline DiscreteState build_bump(const Mesh1D& mesh, const BumpGeometry& g) {
  return build_bump(mesh, g.sbar, g.xbar, g.rho);
}

// |grad u_bar|^2 / (2 J_f(sbar) |B_rho|) with the discrete gradient norm of the
// bump and |B_rho| = 2 rho. Throws HypothesisViolation when J_f(sbar) <= 0.
double lambda_star(const Selection& sel, double sbar, double xbar, double rho, const Mesh1D& mesh);
inline double lambda_star(const Selection& sel, const BumpGeometry& g, const Mesh1D& mesh) {
  return lambda_star(sel, g.sbar, g.xbar, g.rho, mesh);
}

// Preconditioned descent from one start. The residual r of the min-norm
// subgradient is mapped through the H^1_0 Riesz map before the line search.
CriticalPoint descend(const EnergyModel& m, DiscreteState start, const SolverOptions& opts);

// 0, +bump, -bump and three seeded random states in [-2 sbar, 2 sbar]^n.
std::vector<DiscreteState> default_starts(const Mesh1D& mesh, const BumpGeometry& g, std::uint64_t seed);

// Lowest-energy converged point over all starts; if nothing converges, the
// lowest-energy attempt is returned with its status.
CriticalPoint minimize_global(const EnergyModel& m, const std::vector<DiscreteState>& starts,
                              const SolverOptions& opts);

struct MountainPass {
  CriticalPoint point;
  double radius = 0.0;           // H^1 radius of the sampled sphere
  double eta_r = 0.0;            // smallest sampled energy on that sphere
  double endpoint_energy = 0.0;  // phi at the far end of the path
  std::vector<double> path_max;  // max energy along the path, per iteration
};

// Throws GeometryError when no barrier separates 0 from u_far.
MountainPass mountain_pass(const EnergyModel& m, const DiscreteState& u_far, const SolverOptions& opts);

struct TwoSolutions {
  CriticalPoint u1;  // global minimizer
  CriticalPoint u2;  // mountain-pass point
  std::optional<double> lambda_star;
  double eta_r = 0.0;
  bool multiplicity = false;  // both nonzero and distinct
  std::vector<std::string> warnings;
};

// max |u_i| >= 1e3 tol h.
bool is_nonzero(const DiscreteState& u, const SolverOptions& opts, const Mesh1D& mesh);

TwoSolutions solve_two(const EnergyModel& m, const BumpGeometry& g, const SolverOptions& opts);

}  // namespace dincl
