#include "dincl/discretize.hpp"

#include <lapacke.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "dincl/quadrature.hpp"

namespace dincl {

Mesh1D::Mesh1D(double length_, std::size_t n_) : length(length_), n(n_) {
  if (!(length > 0)) throw std::invalid_argument("mesh length must be positive");
  if (n < 1) throw std::invalid_argument("mesh needs at least one interior node");
}

namespace {

std::shared_ptr<const PotentialTable> make_table(const std::shared_ptr<const Selection>& sel, const TableSpec& t) {
  return std::make_shared<const PotentialTable>(sel, -t.range, t.range, t.nodes, t.tol);
}

}  // namespace

EnergyModel::EnergyModel(Mesh1D mesh, std::shared_ptr<const Selection> sel, double lambda, TableSpec table)
    : EnergyModel(mesh, sel, lambda, make_table(sel, table)) {}

EnergyModel::EnergyModel(Mesh1D mesh, std::shared_ptr<const Selection> sel, double lambda,
                         std::shared_ptr<const PotentialTable> table)
    : mesh_(mesh), sel_(std::move(sel)), lambda_(lambda), table_(std::move(table)) {
  if (!(lambda_ > 0)) throw std::invalid_argument("lambda must be positive");
  if (!sel_ || !table_) throw std::invalid_argument("energy model needs a selection and a potential table");

  const std::size_t n = mesh_.n;
  const double h = mesh_.h();
  chol_d_.assign(n, 2.0 / h);
  chol_e_.assign(n > 1 ? n - 1 : 0, -1.0 / h);
  const lapack_int info = LAPACKE_dpttrf(static_cast<lapack_int>(n), chol_d_.data(), chol_e_.data());
  if (info != 0) throw std::runtime_error("stiffness factorization failed (info=" + std::to_string(info) + ")");
}

EnergyModel EnergyModel::with_lambda(double lambda) const { return EnergyModel(mesh_, sel_, lambda, table_); }

void EnergyModel::check_size(std::span<const double> u) const {
  if (u.size() != mesh_.n) {
    throw std::invalid_argument("state has " + std::to_string(u.size()) + " entries, mesh has " +
                                std::to_string(mesh_.n));
  }
}

double EnergyModel::gradient_energy(std::span<const double> u) const {
  check_size(u);
  const double h = mesh_.h();
  double sum = 0.0;
  double prev = 0.0;
  for (double v : u) {
    sum += (v - prev) * (v - prev);
    prev = v;
  }
  sum += prev * prev;
  return 0.5 * sum / h;
}

double EnergyModel::h1_norm(std::span<const double> u) const { return std::sqrt(2.0 * gradient_energy(u)); }

double EnergyModel::h1_dot(std::span<const double> v, std::span<const double> w) const {
  check_size(v);
  check_size(w);
  const double h = mesh_.h();
  double sum = 0.0;
  double pv = 0.0, pw = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sum += (v[i] - pv) * (w[i] - pw);
    pv = v[i];
    pw = w[i];
  }
  sum += pv * pw;
  return sum / h;
}

double EnergyModel::energy(std::span<const double> u) const {
  double pot = 0.0;
  for (double v : u) pot += potential(v);
  return gradient_energy(u) - lambda_ * mesh_.h() * pot;
}

double EnergyModel::energy_delta(std::span<const double> u, std::span<const double> d, double t, bool exact) const {
  check_size(u);
  check_size(d);
  const double h = mesh_.h();
  // Smooth part: 1/2 sum [(a + t b)^2 - a^2] / h with a, b the forward differences of u, d.
  double smooth = 0.0;
  double pu = 0.0, pd = 0.0;
  for (std::size_t i = 0; i <= u.size(); ++i) {
    const double cu = i < u.size() ? u[i] : 0.0;
    const double cd = i < d.size() ? d[i] : 0.0;
    const double a = cu - pu;
    const double b = cd - pd;
    smooth += t * b * (a + 0.5 * t * b);
    pu = cu;
    pd = cd;
  }
  smooth /= h;

  if (!exact) {
    double pot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (t * d[i] != 0.0) pot += potential(u[i] + t * d[i]) - potential(u[i]);
    }
    return smooth - lambda_ * h * pot;
  }

  // Potential part: integral of f over [u_i, u_i + t d_i], split at jumps.
  const Selection& f = *sel_;
  PiecewiseIntegrand g{[&f](double x) { return f(x); },
                       [&f](double x, Side side) { return f.limit(x, side); }};
  double pot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double step = t * d[i];
    if (step == 0.0) continue;
    const double tol = 1e-13 * std::abs(step) * std::max(1.0, std::abs(f.limit(u[i], Side::Right)));
    pot += integrate_piecewise(g, u[i], u[i] + step, f.jumps(), tol).value;
  }
  return smooth - lambda_ * h * pot;
}

std::vector<double> EnergyModel::stiffness_apply(std::span<const double> u) const {
  check_size(u);
  const double h = mesh_.h();
  const std::size_t n = u.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? u[i - 1] : 0.0;
    const double right = i + 1 < n ? u[i + 1] : 0.0;
    g[i] = (2.0 * u[i] - left - right) / h;
  }
  return g;
}

std::vector<Interval> EnergyModel::clarke_box(std::span<const double> u) const {
  check_size(u);
  const double scale = lambda_ * mesh_.h();
  std::vector<Interval> box;
  box.reserve(u.size());
  for (double v : u) box.push_back(sel_->essential_limits(v).scaled(scale));
  return box;
}

Subgradient EnergyModel::min_norm_subgradient(std::span<const double> u) const {
  const std::vector<double> g = stiffness_apply(u);
  const double scale = lambda_ * mesh_.h();
  Subgradient out;
  out.r.resize(u.size());
  out.w.resize(u.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    // The box is a coordinate product, so the projection decomposes per node.
    // Clamping in the multiplier scale keeps w_i inside [f-(u_i), f+(u_i)] exactly.
    out.w[i] = sel_->essential_limits(u[i]).clamp(g[i] / scale);
    out.r[i] = g[i] - scale * out.w[i];
    sq += out.r[i] * out.r[i];
  }
  out.m_phi = std::sqrt(sq);
  return out;
}

std::vector<double> EnergyModel::riesz(std::span<const double> r) const {
  check_size(r);
  std::vector<double> x(r.begin(), r.end());
  const lapack_int n = static_cast<lapack_int>(x.size());
  const lapack_int info = LAPACKE_dpttrs(LAPACK_COL_MAJOR, n, 1, chol_d_.data(), chol_e_.data(), x.data(), n);
  if (info != 0) throw std::runtime_error("stiffness solve failed (info=" + std::to_string(info) + ")");
  return x;
}

}  // namespace dincl
