#pragma once

// CSV artifacts for the command-line driver. Every builder returns the file
// text; headers are fixed.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncpar/io.hpp"
#include "ncpar/pipeline.hpp"
#include "ncpar/sharpness.hpp"

namespace ncpar::artifacts {

inline constexpr Eigen::Index kTrajectoryModes = 16;

inline std::string trajectory_csv(const GalerkinTrajectory& traj) {
  const Eigen::Index modes = std::min(traj.k, kTrajectoryModes);
  std::vector<std::string> header = {"t", "norm_plus_sq", "norm_l2_sq", "dual_f_sq"};
  for (Eigen::Index j = 1; j <= modes; ++j) header.push_back("abs_g" + std::to_string(j));
  io::CsvWriter csv(header);
  for (std::size_t m = 0; m < traj.times.size(); ++m) {
    std::vector<std::string> row = {io::fmt(traj.times[m]), io::fmt(traj.norm_plus_sq[m]),
                                    io::fmt(traj.norm_l2_sq[m]), io::fmt(traj.dual_f_sq[m])};
    for (Eigen::Index j = 0; j < modes; ++j) row.push_back(io::fmt(std::abs(traj.coefficients[m](j))));
    csv.row_strings(row);
  }
  return csv.str();
}

/// Nodal values over all mesh nodes; constrained nodes carry zero.
inline std::string solution_csv(const CVector& full) {
  io::CsvWriter csv({"id", "re", "im"});
  for (Eigen::Index i = 0; i < full.size(); ++i)
    csv.row({std::to_string(i), io::fmt(full(i).real()), io::fmt(full(i).imag())});
  return csv.str();
}

inline std::string report_csv(const RunOutcome& out) {
  io::CsvWriter csv({"quantity", "value"});
  auto put = [&](const std::string& name, double v) { csv.row({name, io::fmt(v)}); };
  const ValidationReport& v = out.disc.validation;
  put("hermitian_residual", v.hermitian_residual);
  put("ellipticity_m", v.ellipticity);
  put("min_complex_eigenvalue", v.min_complex_eigenvalue);
  put("coercive", v.coercive ? 1.0 : 0.0);
  put("dofs", static_cast<double>(out.disc.forms.N));
  put("basis_k", static_cast<double>(out.trajectory.k));
  put("time_steps", static_cast<double>(out.trajectory.steps()));
  put("theta", out.trajectory.theta);
  const EstimateReport& e = out.estimates;
  put("c1", e.c1);
  put("c2", e.c2);
  put("gronwall_factor", e.gronwall_factor);
  put("u0_l2_sq", e.u0_l2_sq);
  put("f_dual_integral", e.f_dual_integral);
  put("bound_rhs", e.rhs);
  put("sup_lhs", e.sup_lhs);
  put("energy_lhs", e.energy_lhs);
  put("sup_margin", e.sup_margin());
  put("energy_margin", e.energy_margin());
  if (out.uniqueness) put("uniqueness_min_eig", out.uniqueness->min_eig);
  for (const CheckResult& c : out.checks) {
    put("check." + c.name + ".value", c.value);
    put("check." + c.name + ".threshold", c.threshold);
    put("check." + c.name + ".passed", c.passed ? 1.0 : 0.0);
  }
  put("all_passed", out.all_passed() ? 1.0 : 0.0);
  return csv.str();
}

inline std::string eigenvalues_csv(const EigenBasis& basis) {
  io::CsvWriter csv({"j", "lambda", "mass_norm"});
  for (Eigen::Index j = 0; j < basis.size(); ++j)
    csv.row({std::to_string(j + 1), io::fmt(basis.eigenvalues(j)), io::fmt(basis.mass_norms(j))});
  return csv.str();
}

/// Coordinate format over the nonzero entries, column-major.
inline std::string coordinate_csv(const CMatrix& a) {
  io::CsvWriter csv({"row", "col", "re", "im"});
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      if (a(r, c) != cd(0.0))
        csv.row({std::to_string(r), std::to_string(c), io::fmt(a(r, c).real()),
                 io::fmt(a(r, c).imag())});
  return csv.str();
}

inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  io::CsvWriter csv({"h", "dt", "error", "order"});
  for (const ConvergenceRow& r : rows)
    csv.row({io::fmt(r.h), io::fmt(r.dt), io::fmt(r.error), r.order ? io::fmt(*r.order) : ""});
  return csv.str();
}

struct SharpnessResult {
  std::string csv;
  bool consistent = true;
};

/// Rows at N, 2N, 4N. The verdict column is the exponent test, "diverges" or
/// "converges", or "inconsistent" when the measured growth contradicts it.
/// Without s only A is summed: partial_B is empty and the verdict is "finite".
inline SharpnessResult sharpness_csv(std::optional<double> s, double epsilon, std::int64_t n) {
  SharpnessResult out;
  std::optional<HsSeries> hs;
  if (s) {
    hs = series_hs_lower_bound(*s, epsilon, n);
    out.consistent = hs->consistent();
  }
  std::string verdict = "finite";
  if (hs) verdict = !out.consistent ? "inconsistent" : (hs->diverges ? "diverges" : "converges");
  io::CsvWriter csv({"N", "partial_A", "tail_A", "partial_B", "verdict"});
  for (int i = 0; i < 3; ++i) {
    const std::int64_t terms = n << i;
    const PlusNormSeries a = series_plus_norm(epsilon, terms);
    std::string b;
    if (hs) b = io::fmt(i == 0 ? hs->partial : i == 1 ? hs->partial_2n : hs->partial_4n);
    csv.row({std::to_string(terms), io::fmt(a.partial), io::fmt(a.tail_bound), b, verdict});
  }
  out.csv = csv.str();
  return out;
}

}  // namespace ncpar::artifacts
