#pragma once

// Faedo-Galerkin basis: eigenvectors of the pencil K_plus h = lambda M h,
// normalised in the (+)-product.

#include <algorithm>
#include <cmath>

#include "ncpar/dense.hpp"

namespace ncpar {

struct EigenBasis {
  RVector eigenvalues;  // ascending, positive
  CMatrix vectors;      // columns h_j over the free dofs
  RVector plus_norms;   // h_j^* K_plus h_j, equal to 1
  RVector mass_norms;   // h_j^* M h_j = 1 / lambda_j

  Eigen::Index size() const { return vectors.cols(); }
};

/// First `count` eigenpairs of K_plus h = lambda M h by Cholesky reduction
/// M = L L^*, Jacobi diagonalisation of L^{-1} K_plus L^{-*}, and back
/// substitution. count <= 0 means all N.
template <typename MassDerived>
EigenBasis generalized_eigenbasis(const CMatrix& k_plus, const Eigen::MatrixBase<MassDerived>& mass,
                                  Eigen::Index count = 0, const JacobiOptions& opts = {}) {
  const Eigen::Index n = k_plus.rows();
  if (count <= 0 || count > n) count = n;
  const CMatrix m = mass.template cast<cd>();
  const CMatrix l = cholesky(m);
  const auto lower = l.triangularView<Eigen::Lower>();
  const CMatrix y = lower.solve(k_plus);                  // L^{-1} K
  CMatrix reduced = lower.solve(CMatrix(y.adjoint())).adjoint();  // L^{-1} K L^{-*}
  reduced = 0.5 * (reduced + reduced.adjoint());

  const HermitianEigen eig = hermitian_eigen(reduced, opts);
  EigenBasis basis;
  basis.eigenvalues = eig.values.head(count);
  // Relative test: a null direction of K_plus surfaces as a roundoff-sized eigenvalue.
  if (eig.values.size() > 0 &&
      !(eig.values(0) > 1e-12 * std::max(std::abs(eig.values(eig.values.size() - 1)), 1e-300))) {
    throw Error(ErrorCode::SingularKPlus, "spectral_basis",
                "pencil has a nonpositive eigenvalue; K_plus is not positive definite");
  }
  // h = L^{-*} y is M-orthonormal; rescale to unit (+)-norm.
  CMatrix h = l.adjoint().triangularView<Eigen::Upper>().solve(eig.vectors.leftCols(count));
  basis.plus_norms.resize(count);
  basis.mass_norms.resize(count);
  for (Eigen::Index j = 0; j < count; ++j) {
    h.col(j) /= std::sqrt(basis.eigenvalues(j));
    basis.plus_norms(j) = h.col(j).dot(k_plus * h.col(j)).real();
    basis.mass_norms(j) = h.col(j).dot(m * h.col(j)).real();
  }
  basis.vectors = std::move(h);
  return basis;
}

struct OrthogonalityReport {
  double plus_residual = 0.0;  // max |h_i^* K h_j - delta_ij|
  double mass_offdiag = 0.0;   // max_{i != j} |h_i^* M h_j|
  double dual_offdiag = 0.0;   // max_{i != j} |(M h_i)^* K^{-1} (M h_j)|, when requested
};

template <typename MassDerived>
OrthogonalityReport verify_orthogonality(const EigenBasis& basis, const CMatrix& k_plus,
                                         const Eigen::MatrixBase<MassDerived>& mass,
                                         bool include_dual = false) {
  OrthogonalityReport r;
  const CMatrix& h = basis.vectors;
  const CMatrix m = mass.template cast<cd>();
  const CMatrix gk = h.adjoint() * k_plus * h;
  const CMatrix mh = m * h;
  const CMatrix gm = h.adjoint() * mh;
  for (Eigen::Index j = 0; j < gk.cols(); ++j) {
    for (Eigen::Index i = 0; i < gk.rows(); ++i) {
      r.plus_residual = std::max(r.plus_residual, std::abs(gk(i, j) - (i == j ? 1.0 : 0.0)));
      if (i != j) r.mass_offdiag = std::max(r.mass_offdiag, std::abs(gm(i, j)));
    }
  }
  if (include_dual) {
    const CholeskySolver k(k_plus);
    CMatrix kinv_mh(mh.rows(), mh.cols());
    for (Eigen::Index j = 0; j < mh.cols(); ++j) kinv_mh.col(j) = k.solve(mh.col(j));
    const CMatrix gd = mh.adjoint() * kinv_mh;
    for (Eigen::Index j = 0; j < gd.cols(); ++j)
      for (Eigen::Index i = 0; i < gd.rows(); ++i)
        if (i != j) r.dual_offdiag = std::max(r.dual_offdiag, std::abs(gd(i, j)));
  }
  return r;
}

}  // namespace ncpar
