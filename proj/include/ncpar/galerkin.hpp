#pragma once

// Faedo-Galerkin semi-discretisation u_k(t) = sum_j g_j(t) h_j and its
// theta-scheme time integration. With H^+-orthonormal h_j the Galerkin
// system reads
//     g_i + sum_j Chat_ij g_j + d_i g_i' = <f, h_i>,   d_i = ||h_i||_{L2}^2.

#include <cmath>
#include <functional>
#include <vector>

#include "ncpar/assembly.hpp"
#include "ncpar/spectral.hpp"

namespace ncpar {

struct GalerkinSystem {
  Eigen::Index k = 0;
  CMatrix basis;        // N x k, columns h_1..h_k
  CMatrix C_hat;        // h_i^* C h_j
  RVector capacitance;  // d_i

  /// Fhat_i = h_i^* F for a reduced load vector F.
  CVector project_load(const CVector& load) const { return basis.adjoint() * load; }
};

inline GalerkinSystem make_galerkin_system(const AssembledForms& forms, const EigenBasis& basis,
                                           Eigen::Index k) {
  if (k <= 0 || k > basis.size()) k = basis.size();
  GalerkinSystem sys;
  sys.k = k;
  sys.basis = basis.vectors.leftCols(k);
  sys.C_hat = sys.basis.adjoint() * forms.C * sys.basis;
  sys.capacitance = basis.mass_norms.head(k);
  return sys;
}

/// Coefficients of the L2-orthogonal projection of a reduced nodal vector
/// onto span{h_1..h_k}: g_j = (h_j^* M U0) / (h_j^* M h_j).
template <typename MassDerived>
CVector project_initial(const CVector& u0, const CMatrix& basis_vectors, const RVector& mass_norms,
                        const Eigen::MatrixBase<MassDerived>& mass) {
  const CVector mu = mass.template cast<cd>() * u0;
  CVector g(basis_vectors.cols());
  for (Eigen::Index j = 0; j < basis_vectors.cols(); ++j)
    g(j) = basis_vectors.col(j).dot(mu) / mass_norms(j);
  return g;
}

/// One-step theta scheme with the step matrix factorised once:
///   (D/dt + theta (I + Chat)) g1 = (D/dt - (1-theta)(I + Chat)) g0
///                                  + theta F1 + (1-theta) F0.
class ThetaStepper {
 public:
  ThetaStepper(const GalerkinSystem& sys, double theta, double dt) : theta_(theta), dt_(dt) {
    if (!(theta >= 0.0 && theta <= 1.0))
      throw Error(ErrorCode::ConfigError, "galerkin_integrator", "theta must lie in [0,1]");
    if (!(dt > 0.0))
      throw Error(ErrorCode::ConfigError, "galerkin_integrator", "time step must be positive");
    const CMatrix generator = CMatrix::Identity(sys.k, sys.k) + sys.C_hat;
    const CMatrix d_over_dt = (sys.capacitance / dt).cast<cd>().asDiagonal();
    implicit_ = d_over_dt + theta * generator;
    explicit_ = d_over_dt - (1.0 - theta) * generator;
    lu_ = LuSolver(implicit_, ErrorCode::SingularStepMatrix, "galerkin_integrator");
  }

  CVector step(const CVector& g, const CVector& f_now, const CVector& f_next) const {
    const CVector rhs = explicit_ * g + theta_ * f_next + (1.0 - theta_) * f_now;
    return lu_.solve(rhs);
  }

  double theta() const { return theta_; }
  double dt() const { return dt_; }

 private:
  double theta_;
  double dt_;
  CMatrix implicit_;
  CMatrix explicit_;
  LuSolver lu_;
};

inline CVector step_theta(const GalerkinSystem& sys, const CVector& g, double theta, double dt,
                          const CVector& f_now, const CVector& f_next) {
  return ThetaStepper(sys, theta, dt).step(g, f_now, f_next);
}

/// Discrete trajectory on a uniform grid with its norm traces.
struct GalerkinTrajectory {
  double theta = 0.5;
  double dt = 0.0;
  Eigen::Index k = 0;
  std::vector<double> times;
  std::vector<CVector> coefficients;  // g(t_m)
  std::vector<CVector> forcing;       // Fhat(t_m)
  std::vector<double> norm_plus_sq;   // g^* g
  std::vector<double> norm_l2_sq;     // sum d_i |g_i|^2
  std::vector<double> dual_f_sq;      // ||f(t_m)||_-^2 from the full load
  double u0_l2_sq = 0.0;              // ||U0||_{L2}^2 of the interpolated initial data

  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
};

struct EvolutionOptions {
  Eigen::Index k = 0;  // <= 0: whole basis
  int time_steps = 100;
  double theta = 0.5;
};

/// Integrates the Galerkin system from the projected initial data to
/// spec.final_time.
inline GalerkinTrajectory solve_evolution(const Mesh& mesh, const ProblemSpec& spec,
                                          const AssembledForms& forms, const EigenBasis& basis,
                                          const EvolutionOptions& opts) {
  if (opts.time_steps < 1)
    throw Error(ErrorCode::ConfigError, "galerkin_integrator", "need at least one time step");
  if (opts.k > basis.size())
    throw Error(ErrorCode::ConfigError, "galerkin_integrator", "k exceeds the basis size");
  const GalerkinSystem sys = make_galerkin_system(forms, basis, opts.k);
  const double dt = spec.final_time / opts.time_steps;
  const ThetaStepper stepper(sys, opts.theta, dt);
  const DualNorm dual(forms.K_plus);

  GalerkinTrajectory traj;
  traj.theta = opts.theta;
  traj.dt = dt;
  traj.k = sys.k;
  const std::size_t count = static_cast<std::size_t>(opts.time_steps) + 1;
  traj.times.reserve(count);
  traj.coefficients.reserve(count);

  const CVector u0 = forms.dofs.reduce_vector(interpolate(mesh, spec.initial));
  traj.u0_l2_sq = std::max(0.0, u0.dot(forms.M.cast<cd>() * u0).real());

  auto record = [&](double t, CVector g, const CVector& load) {
    traj.times.push_back(t);
    traj.norm_plus_sq.push_back(g.squaredNorm());
    double l2 = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) l2 += sys.capacitance(i) * std::norm(g(i));
    traj.norm_l2_sq.push_back(l2);
    traj.dual_f_sq.push_back(dual.squared(load));
    traj.forcing.push_back(sys.project_load(load));
    traj.coefficients.push_back(std::move(g));
  };

  CVector load = forms.dofs.reduce_vector(assemble_load(mesh, spec.source, 0.0));
  record(0.0, project_initial(u0, sys.basis, sys.capacitance, forms.M), load);
  for (int m = 0; m < opts.time_steps; ++m) {
    const double t_next = m + 1 == opts.time_steps ? spec.final_time : (m + 1) * dt;
    const CVector next_load = forms.dofs.reduce_vector(assemble_load(mesh, spec.source, t_next));
    const CVector f_next = sys.project_load(next_load);
    CVector g = stepper.step(traj.coefficients.back(), traj.forcing.back(), f_next);
    record(t_next, std::move(g), next_load);
  }
  return traj;
}

/// Nodal field sum_j g_j(t) h_j with zeros on the closure of S. `t` must be
/// a grid time.
inline CVector reconstruct_solution(const GalerkinTrajectory& traj, const CMatrix& basis_vectors,
                                    const DofMap& dofs, double t) {
  const double tol = 1e-9 * std::max(traj.dt, 1e-300);
  for (std::size_t m = 0; m < traj.times.size(); ++m) {
    if (std::abs(traj.times[m] - t) <= tol) {
      return dofs.expand(basis_vectors.leftCols(traj.k) * traj.coefficients[m]);
    }
  }
  throw Error(ErrorCode::TimeOffGrid, "galerkin_integrator",
              "t = " + std::to_string(t) + " is not a grid time");
}

/// Relative residual of the discrete energy identity at every step:
///   Re(gbar^* D (g1 - g0))/dt + gbar^* gbar + Re(gbar^* Chat gbar) = Re(gbar^* Fbar)
/// with gbar = theta g1 + (1-theta) g0 and Fbar likewise. For theta = 1 this
/// is the identity obtained by testing the Galerkin equations with u_k.
inline std::vector<double> energy_identity_residuals(const GalerkinSystem& sys,
                                                     const GalerkinTrajectory& traj) {
  std::vector<double> out;
  const double th = traj.theta;
  for (std::size_t m = 0; m + 1 < traj.coefficients.size(); ++m) {
    const CVector& g0 = traj.coefficients[m];
    const CVector& g1 = traj.coefficients[m + 1];
    const CVector gbar = th * g1 + (1.0 - th) * g0;
    const CVector fbar = th * traj.forcing[m + 1] + (1.0 - th) * traj.forcing[m];
    const CVector dg = (g1 - g0) / traj.dt;
    const double time_term = gbar.dot(sys.capacitance.cast<cd>().cwiseProduct(dg)).real();
    const double plus_term = gbar.squaredNorm();
    const double lower_term = gbar.dot(sys.C_hat * gbar).real();
    const double source_term = gbar.dot(fbar).real();
    const double scale = std::max({std::abs(time_term), plus_term, std::abs(lower_term),
                                   std::abs(source_term), 1e-300});
    out.push_back(std::abs(time_term + plus_term + lower_term - source_term) / scale);
  }
  return out;
}

/// Time derivative of ||u_k||_{L2}^2 computed two ways on each step:
/// the difference quotient of sum d_i|g_i|^2, and the trapezoidal average
/// of 2 Re <g', D g> with g' taken from the Galerkin equations.
struct DerivativeComparison {
  std::vector<double> difference_quotient;
  std::vector<double> from_equation;
};

inline DerivativeComparison l2_derivative_two_ways(const GalerkinSystem& sys,
                                                   const GalerkinTrajectory& traj) {
  DerivativeComparison out;
  const CMatrix generator = CMatrix::Identity(sys.k, sys.k) + sys.C_hat;
  auto rate = [&](std::size_t m) {
    const CVector& g = traj.coefficients[m];
    const CVector dgdt =
        (traj.forcing[m] - generator * g).cwiseQuotient(sys.capacitance.cast<cd>());
    return 2.0 * g.dot(sys.capacitance.cast<cd>().cwiseProduct(dgdt)).real();
  };
  for (std::size_t m = 0; m + 1 < traj.coefficients.size(); ++m) {
    out.difference_quotient.push_back((traj.norm_l2_sq[m + 1] - traj.norm_l2_sq[m]) / traj.dt);
    out.from_equation.push_back(0.5 * (rate(m) + rate(m + 1)));
  }
  return out;
}

}  // namespace ncpar
