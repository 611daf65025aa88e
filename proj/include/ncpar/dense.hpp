#pragma once

// Dense complex linear algebra kernels: Cholesky factorisation of Hermitian
// positive definite matrices and a cyclic Jacobi eigensolver for Hermitian
// matrices. Storage is Eigen; the factorisations themselves are ours so the
// sign and ordering conventions stay fixed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "ncpar/errors.hpp"

namespace ncpar {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// At most 2x2, never heap allocated. Used for the principal coefficient matrix.
using SmallCMatrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;
using SmallRVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;

/// max_ij |A_ij|
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

/// max_ij |A_ij - conj(A_ji)|
template <typename Derived>
double hermitian_residual(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

/// Lower-triangular factor L with L L^* = A for Hermitian positive definite A.
///
/// Only the lower triangle of `a` is read. Throws NotSPD on a nonpositive or
/// non-finite pivot.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> cholesky(
    const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw Error(ErrorCode::NotSPD, "spectral_basis", "matrix is not square");
  Mat l = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = std::real(a(j, j));
    for (Eigen::Index k = 0; k < j; ++k) pivot -= std::norm(l(j, k));
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      throw Error(ErrorCode::NotSPD, "spectral_basis",
                  "nonpositive pivot " + std::to_string(pivot) + " at row " + std::to_string(j));
    }
    const double d = std::sqrt(pivot);
    l(j, j) = Scalar(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      Scalar s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) {
        if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
          s -= l(i, k) * std::conj(l(j, k));
        } else {
          s -= l(i, k) * l(j, k);
        }
      }
      l(i, j) = s / d;
    }
  }
  return l;
}

/// Cholesky factor kept around for repeated Hermitian positive definite solves.
class CholeskySolver {
 public:
  CholeskySolver() = default;
  explicit CholeskySolver(const CMatrix& a) : lower_(cholesky(a)) {}

  CVector solve(const CVector& b) const {
    CVector y = lower_.triangularView<Eigen::Lower>().solve(b);
    return lower_.adjoint().triangularView<Eigen::Upper>().solve(y);
  }

  const CMatrix& lower() const { return lower_; }
  Eigen::Index size() const { return lower_.rows(); }

 private:
  CMatrix lower_;
};

struct JacobiOptions {
  int max_sweeps = 100;
  double tolerance = 1e-13;  // on |a_pq| / sqrt(|a_pp a_qq|)
  double hermitian_tolerance = 1e-10;
};

struct HermitianEigen {
  RVector values;   // ascending
  CMatrix vectors;  // unitary, columns are eigenvectors
  int sweeps = 0;
};

namespace detail {

// Multiply column j by a unit phase so its largest-modulus entry (first one
// on ties) is real and positive.
inline void fix_column_phase(CMatrix& v, Eigen::Index j) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const double a = std::abs(v(i, j));
    if (a > best * (1.0 + 1e-12)) {
      best = a;
      arg = i;
    }
  }
  if (best > 0.0) v.col(j) *= std::conj(v(arg, j)) / best;
}

// Index of the first component above `floor` and its real part; used to
// order vectors inside a cluster of tied eigenvalues.
inline std::pair<Eigen::Index, double> first_significant(const CMatrix& v, Eigen::Index j,
                                                         double floor) {
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    if (std::abs(v(i, j)) > floor) return {i, v(i, j).real()};
  }
  return {v.rows(), 0.0};
}

}  // namespace detail

/// Eigen-decomposition H V = V diag(values) of a Hermitian matrix by cyclic
/// complex Jacobi rotations.
///
/// Eigenvalues come back ascending. Each eigenvector has its largest-modulus
/// component real positive. Eigenvalues equal to within 1e-10 relative are
/// ordered by the position of their first significant component, then by its
/// real part (descending).
inline HermitianEigen hermitian_eigen(const CMatrix& h, const JacobiOptions& opts = {}) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n) throw Error(ErrorCode::NonHermitian, "spectral_basis", "matrix is not square");
  const double scale = std::max(1.0, max_abs(h));
  if (hermitian_residual(h) > opts.hermitian_tolerance * scale) {
    throw Error(ErrorCode::NonHermitian, "spectral_basis",
                "residual " + std::to_string(hermitian_residual(h)));
  }

  CMatrix a = (h + h.adjoint()) * 0.5;
  CMatrix v = CMatrix::Identity(n, n);
  // Entries below roundoff of ||H||_F count as zero, so exact null eigenvalues converge.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * a.norm();

  auto converged = [&] {
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < j; ++i) {
        const double mod = std::abs(a(i, j));
        if (mod > floor &&
            mod > opts.tolerance * std::sqrt(std::abs(a(i, i).real() * a(j, j).real())))
          return false;
      }
    return true;
  };

  int sweep = 0;
  for (; sweep <= opts.max_sweeps; ++sweep) {
    if (converged()) break;
    if (sweep == opts.max_sweeps) {
      throw Error(ErrorCode::NoConvergence, "spectral_basis",
                  "Jacobi iteration exceeded " + std::to_string(opts.max_sweeps) + " sweeps");
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const cd beta = a(p, q);
        const double mod = std::abs(beta);
        if (mod == 0.0) continue;
        const double alpha = a(p, p).real();
        const double gamma = a(q, q).real();
        // Skip rotations that cannot change the diagonal in floating point.
        if (mod < 1e-300 ||
            (sweep > 3 && std::abs(alpha) + 1e3 * mod == std::abs(alpha) &&
             std::abs(gamma) + 1e3 * mod == std::abs(gamma))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const cd phase = beta / mod;  // e^{i phi}
        const cd phase_c = std::conj(phase);
        const double theta = (gamma - alpha) / (2.0 * mod);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        cd* col_p = a.col(p).data();
        cd* col_q = a.col(q).data();
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const cd ap = col_p[k];
          const cd aq = col_q[k];
          col_p[k] = c * ap - s * phase_c * aq;
          col_q[k] = s * ap + c * phase_c * aq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          a(p, k) = std::conj(col_p[k]);
          a(q, k) = std::conj(col_q[k]);
        }
        a(p, p) = alpha - t * mod;
        a(q, q) = gamma + t * mod;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        cd* vp = v.col(p).data();
        cd* vq = v.col(q).data();
        for (Eigen::Index k = 0; k < n; ++k) {
          const cd x = vp[k];
          const cd y = vq[k];
          vp[k] = c * x - s * phase_c * y;
          vq[k] = s * x + c * phase_c * y;
        }
      }
    }
  }

  for (Eigen::Index j = 0; j < n; ++j) detail::fix_column_phase(v, j);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return a(x, x).real() < a(y, y).real();
  });
  // Reorder clusters of tied eigenvalues deterministically.
  const double tie = 1e-10 * std::max(1.0, max_abs(a.diagonal()));
  for (std::size_t begin = 0; begin < order.size();) {
    std::size_t end = begin + 1;
    while (end < order.size() &&
           a(order[end], order[end]).real() - a(order[begin], order[begin]).real() <= tie)
      ++end;
    if (end - begin > 1) {
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
                       order.begin() + static_cast<std::ptrdiff_t>(end),
                       [&](Eigen::Index x, Eigen::Index y) {
                         const auto kx = detail::first_significant(v, x, 1e-8);
                         const auto ky = detail::first_significant(v, y, 1e-8);
                         if (kx.first != ky.first) return kx.first < ky.first;
                         return kx.second > ky.second;
                       });
    }
    begin = end;
  }

  HermitianEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.values(j) = a(src, src).real();
    out.vectors.col(j) = v.col(src);
  }
  out.sweeps = sweep;
  return out;
}

/// Solve A x = b with partial-pivoting LU, reporting a (near-)singular A.
class LuSolver {
 public:
  LuSolver() = default;
  LuSolver(const CMatrix& a, ErrorCode on_singular, std::string_view module) {
    if (a.rows() == 0) return;
    lu_.compute(a);
    if (!(lu_.rcond() > 1e-14)) {
      throw Error(on_singular, module, "matrix is singular to working precision");
    }
  }
  CVector solve(const CVector& b) const { return lu_.solve(b); }

 private:
  Eigen::PartialPivLU<CMatrix> lu_;
};

}  // namespace ncpar
