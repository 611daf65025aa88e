#pragma once

// A priori energy bounds, the uniqueness condition, and the L2-continuity
// measurement on computed Galerkin trajectories.

#include <algorithm>
#include <cmath>

#include "ncpar/galerkin.hpp"
#include "ncpar/problem.hpp"

namespace ncpar {

struct EstimateConstants {
  double c1 = 0.0;  // (sum_l sup|a_l|^2)^{1/2}
  double c2 = 0.0;  // sup |delta a0|
};

/// Sup-norms estimated on the validation sample grid.
inline EstimateConstants compute_constants(const ProblemSpec& spec, int sample_density = 32) {
  EstimateConstants c;
  const auto samples = spec.domain.interior_samples(sample_density);
  double sum_sq = 0.0;
  for (const ComplexField& a : spec.first_order) {
    double sup = 0.0;
    for (const Point& x : samples) sup = std::max(sup, std::abs(a(x)));
    sum_sq += sup * sup;
  }
  c.c1 = std::sqrt(sum_sq);
  if (spec.zero_order_delta_a0) {
    for (const Point& x : samples) c.c2 = std::max(c.c2, std::abs(spec.zero_order_delta_a0(x)));
  }
  return c;
}

inline double trapezoid(const std::vector<double>& values, double dt) {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * dt;
}

struct EstimateReport {
  double c1 = 0.0;
  double c2 = 0.0;
  double gronwall_factor = 1.0;  // exp((2 c2 + 2 c1^2) T)
  double u0_l2_sq = 0.0;
  double f_dual_integral = 0.0;  // int_0^T ||f||_-^2
  double rhs = 0.0;
  double sup_lhs = 0.0;     // sup_s ||u_k(s)||^2
  double energy_lhs = 0.0;  // 1/2 int ||u_k||_+^2 + ||u_k(T)||^2
  double slack = 0.02;
  bool sup_ok = false;
  bool energy_ok = false;

  double sup_margin() const { return rhs * (1.0 + slack) - sup_lhs; }
  double energy_margin() const { return rhs * (1.0 + slack) - energy_lhs; }
};

/// Evaluates both sides of
///   sup_s ||u_k(s)||^2               <= (||u0||^2 + int ||f||_-^2) e^{(2c2+2c1^2)T}
///   1/2 int ||u_k||_+^2 + ||u_k(T)||^2 <= same
/// with trapezoidal time integrals. A violated bound is reported, not thrown.
inline EstimateReport apriori_bounds(const GalerkinTrajectory& traj, double u0_l2_sq, double c1,
                                     double c2, double final_time, double slack = 0.02) {
  EstimateReport r;
  r.c1 = c1;
  r.c2 = c2;
  r.slack = slack;
  r.u0_l2_sq = u0_l2_sq;
  r.gronwall_factor = std::exp((2.0 * c2 + 2.0 * c1 * c1) * final_time);
  r.f_dual_integral = trapezoid(traj.dual_f_sq, traj.dt);
  r.rhs = (u0_l2_sq + r.f_dual_integral) * r.gronwall_factor;
  r.sup_lhs = traj.norm_l2_sq.empty()
                  ? 0.0
                  : *std::max_element(traj.norm_l2_sq.begin(), traj.norm_l2_sq.end());
  r.energy_lhs = 0.5 * trapezoid(traj.norm_plus_sq, traj.dt) +
                 (traj.norm_l2_sq.empty() ? 0.0 : traj.norm_l2_sq.back());
  r.sup_ok = r.sup_lhs <= r.rhs * (1.0 + slack);
  r.energy_ok = r.energy_lhs <= r.rhs * (1.0 + slack);
  return r;
}

struct UniquenessCheck {
  double min_eig = 0.0;
  bool holds = false;
};

/// Smallest eigenvalue of the Hermitian part (C + C^*)/2; the condition
/// Re(v^* C v) >= 0 for all v holds iff it is >= -tol.
inline UniquenessCheck check_uniqueness_condition(const CMatrix& c, double tol = 1e-10) {
  UniquenessCheck u;
  if (c.size() == 0) {
    u.holds = true;
    return u;
  }
  const CMatrix herm = 0.5 * (c + c.adjoint());
  u.min_eig = hermitian_eigen(herm).values(0);
  u.holds = u.min_eig >= -tol;
  return u;
}

struct ContinuityCheck {
  double max_jump = 0.0;  // max_m | ||u(t_{m+1})|| - ||u(t_m)|| |
  double dt = 0.0;
  double jump_per_dt() const { return dt > 0.0 ? max_jump / dt : 0.0; }
};

inline ContinuityCheck check_continuity(const GalerkinTrajectory& traj) {
  ContinuityCheck c;
  c.dt = traj.dt;
  for (std::size_t m = 0; m + 1 < traj.norm_l2_sq.size(); ++m) {
    const double jump = std::abs(std::sqrt(traj.norm_l2_sq[m + 1]) - std::sqrt(traj.norm_l2_sq[m]));
    c.max_jump = std::max(c.max_jump, jump);
  }
  return c;
}

/// max_m ||u_a(t_m) - u_b(t_m)||_{L2} for two trajectories on the same grid and basis.
inline double sup_l2_difference(const GalerkinTrajectory& a, const GalerkinTrajectory& b,
                                const RVector& mass_norms) {
  if (a.coefficients.size() != b.coefficients.size() || a.k != b.k)
    throw Error(ErrorCode::ConfigError, "estimates", "trajectories are on different grids");
  double sup = 0.0;
  for (std::size_t m = 0; m < a.coefficients.size(); ++m) {
    const CVector diff = a.coefficients[m] - b.coefficients[m];
    double s = 0.0;
    for (Eigen::Index i = 0; i < diff.size(); ++i) s += mass_norms(i) * std::norm(diff(i));
    sup = std::max(sup, std::sqrt(s));
  }
  return sup;
}

}  // namespace ncpar
