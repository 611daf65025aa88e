#pragma once

// Continuous problem data for
//   du/dt - div(A grad u) + sum_l a_l D_l u + a0 u = f   in Omega x (0,T)
//   b1 (A grad u . nu) + b0 u = 0                          on dOmega
// with Hermitian, possibly non-coercive principal matrix A.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "ncpar/dense.hpp"
#include "ncpar/domain.hpp"

namespace ncpar {

using ComplexField = std::function<cd(const Point&)>;
using RealField = std::function<double(const Point&)>;
using MatrixField = std::function<SmallCMatrix(const Point&)>;
using SpaceTimeField = std::function<cd(const Point&, double)>;
/// Decides whether a boundary facet (given by its midpoint) belongs to S.
using FacetSelector = std::function<bool(const Point&)>;

struct Tolerances {
  double hermitian = 1e-12;
  double psd = 1e-10;
  double factorization = 1e-10;
};

struct ProblemSpec {
  Domain domain;
  double final_time = 1.0;
  MatrixField principal;
  /// Coefficients of the first-order summand sum_l a_l D_l; empty means zero.
  std::vector<ComplexField> first_order;
  RealField zero_order_a00;
  ComplexField zero_order_delta_a0;
  RealField boundary_b1;
  RealField boundary_b00;
  ComplexField boundary_delta_b0;  // recorded, never assembled
  FacetSelector dirichlet_set;
  SpaceTimeField source;
  ComplexField initial;

  int dim() const { return domain.dim(); }
};

// ---------------------------------------------------------------------------
// Splitting of the zero-order coefficients

struct A0Split {
  double a00;
  cd delta_a0;
};

struct B0Split {
  double b00;
  cd delta_b0;
};

inline A0Split split_a0(cd a0) {
  const double a00 = std::max(a0.real(), 0.0);
  return {a00, a0 - a00};
}

/// Throws DivisionByZeroB1 when b1 == 0; callers only evaluate this off S.
inline B0Split split_b0(cd b0, double b1) {
  if (b1 == 0.0) {
    throw Error(ErrorCode::DivisionByZeroB1, "problem_model",
                "b1 vanishes on a boundary facet outside S");
  }
  const double b00 = b1 * std::max((b0 / b1).real(), 0.0);
  return {b00, b0 - b00};
}

struct ZeroOrderSplit {
  RealField a00;
  ComplexField delta_a0;
  RealField b00;
  ComplexField delta_b0;
};

inline ZeroOrderSplit split_zero_order(ComplexField a0, ComplexField b0, RealField b1) {
  ZeroOrderSplit s;
  s.a00 = [a0](const Point& x) { return split_a0(a0(x)).a00; };
  s.delta_a0 = [a0](const Point& x) { return split_a0(a0(x)).delta_a0; };
  s.b00 = [b0, b1](const Point& x) { return split_b0(b0(x), b1(x)).b00; };
  s.delta_b0 = [b0, b1](const Point& x) { return split_b0(b0(x), b1(x)).delta_b0; };
  return s;
}

/// Boundary coefficient b00/b1 entering the Hermitian form.
inline double robin_ratio(const ProblemSpec& spec, const Point& x) {
  const double b1 = spec.boundary_b1(x);
  if (b1 == 0.0) {
    throw Error(ErrorCode::DivisionByZeroB1, "problem_model",
                "b1 vanishes on a boundary facet outside S");
  }
  return spec.boundary_b00(x) / b1;
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
  double hermitian_residual = 0.0;
  double ellipticity = std::numeric_limits<double>::infinity();  // m
  double min_complex_eigenvalue = std::numeric_limits<double>::infinity();
  double min_random_form = std::numeric_limits<double>::infinity();
  double max_random_form_imag = 0.0;
  double min_a00 = std::numeric_limits<double>::infinity();
  double min_robin_ratio = std::numeric_limits<double>::infinity();
  std::size_t interior_samples = 0;
  std::size_t boundary_samples = 0;

  bool hermitian = false;
  bool elliptic = false;
  bool positive = false;
  bool coercive = false;  // strong (complex) coercivity; informational only
  bool a00_nonnegative = false;
  bool robin_nonnegative = false;
  bool final_time_positive = false;

  bool ok() const {
    return hermitian && elliptic && positive && a00_nonnegative && robin_nonnegative &&
           final_time_positive;
  }
};

/// Eigenvalues of a Hermitian matrix of size at most 2, ascending.
inline SmallRVector small_hermitian_eigenvalues(const SmallCMatrix& a) {
  SmallRVector out(a.rows());
  if (a.rows() == 1) {
    out(0) = a(0, 0).real();
    return out;
  }
  const double p = a(0, 0).real();
  const double q = a(1, 1).real();
  const double off = std::abs(0.5 * (a(0, 1) + std::conj(a(1, 0))));
  const double mean = 0.5 * (p + q);
  const double rad = std::hypot(0.5 * (p - q), off);
  out(0) = mean - rad;
  out(1) = mean + rad;
  return out;
}

/// Samples the coefficient fields and checks the structural assumptions on
/// the principal matrix (Hermitian, real-elliptic, complex positive) and the
/// sign conditions on a00 and b00/b1.
///
/// Throws NonHermitian, NotElliptic or NotPositiveSemidefinite (in that order
/// of precedence); the remaining sign conditions raise ConfigError.
inline ValidationReport validate_coefficients(const ProblemSpec& spec, int sample_density = 32,
                                              const Tolerances& tol = {},
                                              int random_directions = 64) {
  ValidationReport r;
  const int n = spec.dim();
  const auto interior = spec.domain.interior_samples(sample_density);
  r.interior_samples = interior.size();
  std::mt19937_64 rng(20200616);
  std::normal_distribution<double> gauss;

  for (const Point& x : interior) {
    const SmallCMatrix a = spec.principal(x);
    if (a.rows() != n || a.cols() != n) {
      throw Error(ErrorCode::ConfigError, "problem_model",
                  "principal matrix has wrong size for the domain dimension");
    }
    r.hermitian_residual = std::max(r.hermitian_residual, hermitian_residual(a));
    const SmallCMatrix herm = 0.5 * (a + a.adjoint());

    // Real quadratic form xi^T A xi = xi^T Re(A) xi for real xi.
    SmallCMatrix re(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) re(i, j) = cd(0.5 * (herm(i, j).real() + herm(j, i).real()), 0);
    r.ellipticity = std::min(r.ellipticity, small_hermitian_eigenvalues(re)(0));
    r.min_complex_eigenvalue = std::min(r.min_complex_eigenvalue, small_hermitian_eigenvalues(herm)(0));

    for (int k = 0; k < random_directions; ++k) {
      Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, 2, 1> w(n);
      for (int i = 0; i < n; ++i) w(i) = cd(gauss(rng), gauss(rng));
      w /= w.norm();
      const cd form = w.dot(a * w);  // w^* A w
      r.min_random_form = std::min(r.min_random_form, form.real());
      r.max_random_form_imag = std::max(r.max_random_form_imag, std::abs(form.imag()));
    }
    if (spec.zero_order_a00) r.min_a00 = std::min(r.min_a00, spec.zero_order_a00(x));
  }

  const auto boundary = spec.domain.boundary_samples(sample_density);
  for (const Point& x : boundary) {
    if (spec.dirichlet_set && spec.dirichlet_set(x)) continue;
    ++r.boundary_samples;
    r.min_robin_ratio = std::min(r.min_robin_ratio, robin_ratio(spec, x));
  }

  r.hermitian = r.hermitian_residual <= tol.hermitian;
  r.elliptic = r.ellipticity > 0.0;
  r.positive = r.min_complex_eigenvalue >= -tol.psd && r.min_random_form >= -tol.psd;
  r.coercive = r.min_complex_eigenvalue > tol.psd;
  r.a00_nonnegative = !(r.min_a00 < 0.0);
  r.robin_nonnegative = !(r.min_robin_ratio < 0.0);
  r.final_time_positive = spec.final_time > 0.0;

  if (!r.hermitian)
    throw Error(ErrorCode::NonHermitian, "problem_model",
                "principal matrix Hermitian residual " + std::to_string(r.hermitian_residual));
  if (!r.elliptic)
    throw Error(ErrorCode::NotElliptic, "problem_model",
                "ellipticity constant " + std::to_string(r.ellipticity));
  if (!r.positive)
    throw Error(ErrorCode::NotPositiveSemidefinite, "problem_model",
                "minimum eigenvalue " + std::to_string(r.min_complex_eigenvalue));
  if (!r.a00_nonnegative)
    throw Error(ErrorCode::ConfigError, "problem_model", "a00 is negative somewhere");
  if (!r.robin_nonnegative)
    throw Error(ErrorCode::ConfigError, "problem_model", "b00/b1 is negative somewhere off S");
  if (!r.final_time_positive)
    throw Error(ErrorCode::ConfigError, "problem_model", "final time must be positive");
  return r;
}

// ---------------------------------------------------------------------------
// Factorisation A = D^* D

/// Hermitian positive semidefinite square root. Eigenvalues in [-psd_tol, 0)
/// are clipped to zero.
inline SmallCMatrix hermitian_sqrt(const SmallCMatrix& a, double psd_tol = Tolerances{}.psd) {
  const Eigen::Index n = a.rows();
  const CMatrix herm = 0.5 * (CMatrix(a) + CMatrix(a).adjoint());
  const HermitianEigen eig = hermitian_eigen(herm);
  SmallCMatrix out = SmallCMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double lambda = eig.values(k);
    if (lambda < -psd_tol) {
      throw Error(ErrorCode::NotPositiveSemidefinite, "problem_model",
                  "eigenvalue " + std::to_string(lambda) + " of the principal matrix");
    }
    lambda = std::max(lambda, 0.0);
    const auto v = eig.vectors.col(k);
    out += std::sqrt(lambda) * (v * v.adjoint());
  }
  return out;
}

struct FactorizedPrincipal {
  MatrixField factor;  // x -> D(x), n x n
  double residual_bound = 0.0;
  int rows = 0;
};

inline FactorizedPrincipal factorize_principal(const ProblemSpec& spec,
                                               const std::vector<Point>& sample_points,
                                               const Tolerances& tol = {}) {
  FactorizedPrincipal f;
  f.rows = spec.dim();
  MatrixField principal = spec.principal;
  const double psd = tol.psd;
  f.factor = [principal, psd](const Point& x) { return hermitian_sqrt(principal(x), psd); };
  for (const Point& x : sample_points) {
    const SmallCMatrix d = f.factor(x);
    const SmallCMatrix diff = d.adjoint() * d - spec.principal(x);
    f.residual_bound = std::max(f.residual_bound, max_abs(diff));
  }
  if (f.residual_bound > tol.factorization) {
    throw Error(ErrorCode::NotPositiveSemidefinite, "problem_model",
                "factorisation residual " + std::to_string(f.residual_bound));
  }
  return f;
}

}  // namespace ncpar
