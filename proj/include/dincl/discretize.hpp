#pragma once

// Finite-difference Dirichlet energy on (0, L):
//
//   phi_h(u) = 1/2 sum_{i=0..n} ((u_{i+1} - u_i)/h)^2 h  -  lambda h sum_{i=1..n} J_f(u_i),
//
// with u_0 = u_{n+1} = 0. Both terms carry the factor h, so a discrete critical
// point satisfies g_i = lambda h xi_i with xi_i in [f-(u_i), f+(u_i)].

#include <memory>
#include <span>
#include <vector>

#include "dincl/interval.hpp"
#include "dincl/selection.hpp"

namespace dincl {

struct Mesh1D {
  double length = 1.0;
  std::size_t n = 1;  // interior nodes

  Mesh1D() = default;
  Mesh1D(double length, std::size_t n);

  double h() const { return length / static_cast<double>(n + 1); }
  double x(std::size_t i) const { return static_cast<double>(i + 1) * h(); }  // i = 0..n-1
};

struct DiscreteState {
  std::vector<double> u;

  DiscreteState() = default;
  explicit DiscreteState(std::vector<double> values) : u(std::move(values)) {}
  static DiscreteState zeros(std::size_t n) { return DiscreteState(std::vector<double>(n, 0.0)); }
  std::size_t size() const { return u.size(); }
};

struct Subgradient {
  std::vector<double> r;  // g - xi*, the min-norm element
  double m_phi = 0.0;     // euclidean norm of r
  std::vector<double> w;  // xi* / (lambda h), the candidate multiplier
};

struct TableSpec {
  double range = 512.0;       // table covers [-range, range]
  std::size_t nodes = 1 << 17;
  double tol = 1e-10;
};

class EnergyModel {
 public:
  // Builds a PotentialTable from `table` unless one is supplied.
  EnergyModel(Mesh1D mesh, std::shared_ptr<const Selection> sel, double lambda, TableSpec table = {});
  EnergyModel(Mesh1D mesh, std::shared_ptr<const Selection> sel, double lambda,
              std::shared_ptr<const PotentialTable> table);

  // Same mesh, selection and table at a different lambda.
  EnergyModel with_lambda(double lambda) const;

  const Mesh1D& mesh() const { return mesh_; }
  const Selection& selection() const { return *sel_; }
  std::shared_ptr<const Selection> selection_ptr() const { return sel_; }
  std::shared_ptr<const PotentialTable> table() const { return table_; }
  double lambda() const { return lambda_; }

  // J_f through the table (direct quadrature outside its range).
  double potential(double s) const { return (*table_)(s); }

  double energy(std::span<const double> u) const;

  // phi(u + t d) - phi(u), summed termwise so it stays accurate when the
  // change is far below the rounding level of phi itself. With `exact` off the
  // potential increments come from table differences instead of quadrature.
  double energy_delta(std::span<const double> u, std::span<const double> d, double t, bool exact = true) const;

  // 1/2 sum ((u_{i+1} - u_i)/h)^2 h  (the squared H^1_0 norm over two).
  double gradient_energy(std::span<const double> u) const;
  double h1_norm(std::span<const double> u) const;
  // v^T M w with M = K/h, the inner product behind h1_norm.
  double h1_dot(std::span<const double> v, std::span<const double> w) const;

  std::vector<double> stiffness_apply(std::span<const double> u) const;
  std::vector<Interval> clarke_box(std::span<const double> u) const;
  Subgradient min_norm_subgradient(std::span<const double> u) const;

  // Solves M x = r with M = K/h; maps a residual to its H^1_0 representative.
  std::vector<double> riesz(std::span<const double> r) const;

 private:
  void check_size(std::span<const double> u) const;

  Mesh1D mesh_;
  std::shared_ptr<const Selection> sel_;
  double lambda_;
  std::shared_ptr<const PotentialTable> table_;
  std::vector<double> chol_d_, chol_e_;  // LDL^T factors of M
};

inline double energy(const EnergyModel& m, const DiscreteState& u) { return m.energy(u.u); }
inline std::vector<double> stiffness_apply(const EnergyModel& m, const DiscreteState& u) {
  return m.stiffness_apply(u.u);
}
inline std::vector<Interval> clarke_box(const EnergyModel& m, const DiscreteState& u) { return m.clarke_box(u.u); }
inline Subgradient min_norm_subgradient(const EnergyModel& m, const DiscreteState& u) {
  return m.min_norm_subgradient(u.u);
}

}  // namespace dincl
