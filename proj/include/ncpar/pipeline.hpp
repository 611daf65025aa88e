#pragma once

// End-to-end runs: validate -> assemble -> eigenbasis -> integrate -> checks,
// and the convergence studies built on top of them.

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ncpar/config.hpp"
#include "ncpar/estimates.hpp"
#include "ncpar/galerkin.hpp"
#include "ncpar/mesh.hpp"
#include "ncpar/spectral.hpp"

namespace ncpar {

inline constexpr double kOrthoTol = 1e-9;
inline constexpr double kEnergyTol = 1e-9;
inline constexpr double kUniquenessTol = 1e-10;

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// Everything computed by one solve, kept for reporting.
struct Discretization {
  ResolvedProblem problem;
  ValidationReport validation;
  Mesh mesh;
  FactorizedPrincipal factorized;
  AssembledForms forms;
  EigenBasis basis;
};

inline Discretization discretize(const RunConfig& config, bool need_basis = true) {
  Discretization d;
  d.problem = resolve_problem(config);
  const ProblemSpec& spec = d.problem.spec;
  d.validation = validate_coefficients(spec);
  d.mesh = build_mesh(spec.domain, d.problem.resolution, spec.dirichlet_set);
  d.factorized = factorize_principal(spec, spec.domain.interior_samples(32));
  d.forms = assemble_forms(d.mesh, spec, d.factorized);
  if (need_basis) d.basis = generalized_eigenbasis(d.forms.K_plus, d.forms.M);
  return d;
}

struct RunOutcome {
  Discretization disc;
  GalerkinSystem system;
  GalerkinTrajectory trajectory;
  EstimateConstants constants;
  EstimateReport estimates;
  std::optional<UniquenessCheck> uniqueness;
  std::optional<OrthogonalityReport> orthogonality;
  double max_energy_residual = 0.0;
  std::vector<ContinuityCheck> continuity;  // steps, 2 steps, 4 steps
  std::vector<double> twin_differences;     // steps, 2 steps, 4 steps
  std::optional<double> cauchy_ratio;
  std::vector<CheckResult> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

inline EvolutionOptions evolution_options(const RunConfig& config, const ResolvedProblem& p) {
  EvolutionOptions o;
  o.k = config.basis_k;
  o.time_steps = p.time_steps;
  o.theta = config.theta;
  return o;
}

/// Largest |v^* C u| / (c sqrt(u^*(K+M)u) sqrt(v^*(K+M)v)) over random pairs,
/// with c = c1 + c2; at most 1 when the lower-order form is bounded as claimed.
inline double cauchy_bound_ratio(const AssembledForms& forms, const EstimateConstants& c,
                                 unsigned long seed, int samples = 200) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const auto n = static_cast<Eigen::Index>(forms.N);
  const CMatrix energy = forms.K_plus + forms.M.cast<cd>();
  auto random_vector = [&] {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cd(g(rng), g(rng));
    return v;
  };
  const double constant = c.c1 + c.c2;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const CVector u = random_vector();
    const CVector v = random_vector();
    const double lhs = std::abs(v.dot(forms.C * u));
    const double nu = std::sqrt(u.dot(energy * u).real());
    const double nv = std::sqrt(v.dot(energy * v).real());
    if (constant == 0.0) {
      worst = std::max(worst, lhs > 1e-12 * nu * nv ? INFINITY : 0.0);
    } else {
      worst = std::max(worst, lhs / (constant * nu * nv));
    }
  }
  return worst;
}

inline RunOutcome run_solve(const RunConfig& config, unsigned long seed = 1) {
  RunOutcome out;
  out.disc = discretize(config);
  const Discretization& d = out.disc;
  const ProblemSpec& spec = d.problem.spec;
  const EvolutionOptions opts = evolution_options(config, d.problem);

  out.system = make_galerkin_system(d.forms, d.basis, opts.k);
  out.trajectory = solve_evolution(d.mesh, spec, d.forms, d.basis, opts);
  out.constants = compute_constants(spec);
  out.estimates = apriori_bounds(out.trajectory, out.trajectory.u0_l2_sq, out.constants.c1,
                                 out.constants.c2, spec.final_time);

  auto add = [&](std::string name, double value, double threshold, bool passed) {
    out.checks.push_back({std::move(name), value, threshold, passed});
  };

  if (config.checks.apriori) {
    add("apriori_sup", out.estimates.sup_lhs, out.estimates.rhs * (1.0 + out.estimates.slack),
        out.estimates.sup_ok);
    add("apriori_energy", out.estimates.energy_lhs,
        out.estimates.rhs * (1.0 + out.estimates.slack), out.estimates.energy_ok);
  }
  if (config.checks.energy) {
    const auto res = energy_identity_residuals(out.system, out.trajectory);
    out.max_energy_residual = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
    add("energy_identity", out.max_energy_residual, kEnergyTol, out.max_energy_residual <= kEnergyTol);
  }
  if (config.checks.orthogonality) {
    out.orthogonality = verify_orthogonality(d.basis, d.forms.K_plus, d.forms.M);
    add("orthogonality_plus", out.orthogonality->plus_residual, kOrthoTol,
        out.orthogonality->plus_residual <= kOrthoTol);
    add("orthogonality_mass", out.orthogonality->mass_offdiag, kOrthoTol,
        out.orthogonality->mass_offdiag <= kOrthoTol);
  }
  if (config.checks.uniqueness) {
    out.uniqueness = check_uniqueness_condition(out.system.C_hat, kUniquenessTol);
    add("uniqueness_min_eig", out.uniqueness->min_eig, -kUniquenessTol, out.uniqueness->holds);
  }
  if (config.checks.continuity) {
    for (int refine = 0; refine < 3; ++refine) {
      EvolutionOptions o = opts;
      o.time_steps = opts.time_steps << refine;
      out.continuity.push_back(
          refine == 0 ? check_continuity(out.trajectory)
                      : check_continuity(solve_evolution(d.mesh, spec, d.forms, d.basis, o)));
    }
    bool shrinks = true;
    double worst_ratio = INFINITY;
    for (std::size_t i = 0; i + 1 < out.continuity.size(); ++i) {
      const double a = out.continuity[i].max_jump;
      const double b = out.continuity[i + 1].max_jump;
      const double ratio = b > 0.0 ? a / b : (a > 0.0 ? INFINITY : 2.0);
      worst_ratio = std::min(worst_ratio, ratio);
      shrinks = shrinks && (a == 0.0 ? b == 0.0 : ratio >= 1.5);
    }
    add("continuity_jump_ratio", worst_ratio, 1.5, shrinks);
  }
  if (config.checks.twin) {
    double worst = INFINITY, best = 0.0;
    for (int refine = 0; refine < 3; ++refine) {
      EvolutionOptions cn = opts, be = opts;
      cn.time_steps = be.time_steps = opts.time_steps << refine;
      cn.theta = 0.5;
      be.theta = 1.0;
      out.twin_differences.push_back(sup_l2_difference(
          solve_evolution(d.mesh, spec, d.forms, d.basis, cn),
          solve_evolution(d.mesh, spec, d.forms, d.basis, be), out.system.capacitance));
    }
    for (std::size_t i = 0; i + 1 < out.twin_differences.size(); ++i) {
      const double ratio = out.twin_differences[i] / out.twin_differences[i + 1];
      worst = std::min(worst, ratio);
      best = std::max(best, ratio);
    }
    const bool trivial = out.twin_differences.front() == 0.0;
    add("twin_solve_ratio", worst, 1.5, trivial || (worst >= 1.5 && best <= 2.5));
  }
  if (config.checks.cauchy) {
    out.cauchy_ratio = cauchy_bound_ratio(d.forms, out.constants, seed);
    add("cauchy_bound_ratio", *out.cauchy_ratio, 1.0, *out.cauchy_ratio <= 1.0 + 1e-12);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convergence studies

struct ConvergenceRow {
  double h = 0.0;
  double dt = 0.0;
  double error = 0.0;           // absolute
  double relative_error = 0.0;  // relative to the oracle's norm
  std::optional<double> order;  // log2(e_{i-1}/e_i)
};

/// Errors against the preset's closed-form oracle over refinement levels.
///  combined: levels are resolutions, dt = h/10.
///  time:     levels are step counts on the configured mesh.
///  eigen:    levels are resolutions; error is max_{j<=3} |lambda_j - (j pi/L)^2| / (j pi/L)^2.
inline std::vector<ConvergenceRow> run_convergence(const RunConfig& config, int jobs = 1) {
  const ResolvedProblem base = resolve_problem(config);
  if (!base.exact)
    throw Error(ErrorCode::NoOracle, "cli", "preset '" + config.preset + "' has no oracle");
  const Domain& dom = base.spec.domain;
  const double length = dom.bx - dom.ax;
  const double final_time = base.spec.final_time;
  if (config.convergence_kind == "eigen" && dom.dim() != 1)
    throw Error(ErrorCode::NoOracle, "cli", "eigenvalue oracle is one-dimensional");

  auto level = [&](int lvl) {
    RunConfig c = config;
    ConvergenceRow row;
    if (config.convergence_kind == "time") {
      c.time_steps = lvl;
    } else {
      c.resolution = lvl;
      const double h = length / lvl;
      c.time_steps = static_cast<int>(std::ceil(final_time / (h / 10.0) - 1e-9));
    }
    c.checks = CheckSelection{false, false, false, false, false, false, false};
    const Discretization d = discretize(c);
    row.h = length / d.problem.resolution;
    row.dt = final_time / d.problem.time_steps;
    if (config.convergence_kind == "eigen") {
      double worst = 0.0;
      for (int j = 1; j <= std::min<Eigen::Index>(3, d.basis.size()); ++j) {
        const double exact = std::pow(j * std::numbers::pi / length, 2);
        worst = std::max(worst, std::abs(d.basis.eigenvalues(j - 1) - exact) / exact);
      }
      row.error = row.relative_error = worst;
      return row;
    }
    const GalerkinTrajectory traj = solve_evolution(d.mesh, d.problem.spec, d.forms, d.basis,
                                                    evolution_options(c, d.problem));
    const CVector u = reconstruct_solution(traj, d.basis.vectors, d.forms.dofs, final_time);
    const auto exact_t = [&](const Point& x) { return base.exact(x, final_time); };
    row.error = l2_error(d.mesh, u, exact_t);
    const double norm = l2_error(d.mesh, CVector::Zero(u.size()), exact_t);
    row.relative_error = norm > 0.0 ? row.error / norm : row.error;
    return row;
  };

  std::vector<ConvergenceRow> rows(config.convergence_levels.size());
  const std::size_t batch = static_cast<std::size_t>(std::max(jobs, 1));
  for (std::size_t start = 0; start < rows.size(); start += batch) {
    std::vector<std::future<ConvergenceRow>> pending;
    const std::size_t stop = std::min(rows.size(), start + batch);
    for (std::size_t i = start; i < stop; ++i) {
      if (batch == 1) {
        rows[i] = level(config.convergence_levels[i]);
      } else {
        pending.push_back(std::async(std::launch::async, level, config.convergence_levels[i]));
      }
    }
    for (std::size_t i = 0; i < pending.size(); ++i) rows[start + i] = pending[i].get();
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].error > 0.0 && rows[i - 1].error > 0.0)
      rows[i].order = std::log2(rows[i - 1].error / rows[i].error);
  }
  return rows;
}

}  // namespace ncpar
