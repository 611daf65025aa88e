#pragma once

// P1 finite element realisation of H^1(Omega, S): the Hermitian form (.,.)_+,
// the L2 mass matrix, the lower-order form and load vectors, with the
// constraint u = 0 on the closure of S imposed by eliminating nodes.

#include <array>
#include <cmath>
#include <vector>

#include "ncpar/dense.hpp"
#include "ncpar/mesh.hpp"
#include "ncpar/problem.hpp"

namespace ncpar {

// ---------------------------------------------------------------------------
// Quadrature and element geometry

struct QuadraturePoint {
  std::array<double, 3> bary;  // P1 shape values at the point
  double weight;               // fraction of the element measure
};

/// Two-point Gauss on segments, three-point (degree 2) rule on triangles.
inline std::vector<QuadraturePoint> element_rule(int dim) {
  if (dim == 1) {
    const double g = 0.5 / std::sqrt(3.0);
    return {{{0.5 + g, 0.5 - g, 0.0}, 0.5}, {{0.5 - g, 0.5 + g, 0.0}, 0.5}};
  }
  const double a = 2.0 / 3.0, b = 1.0 / 6.0, w = 1.0 / 3.0;
  return {{{a, b, b}, w}, {{b, a, b}, w}, {{b, b, a}, w}};
}

/// Higher-order rule used only for error measurement: 3-point Gauss on
/// segments, 6-point degree-4 rule on triangles.
inline std::vector<QuadraturePoint> accurate_rule(int dim) {
  if (dim == 1) {
    const double g = 0.5 * std::sqrt(0.6);
    return {{{0.5 + g, 0.5 - g, 0.0}, 5.0 / 18.0},
            {{0.5, 0.5, 0.0}, 8.0 / 18.0},
            {{0.5 - g, 0.5 + g, 0.0}, 5.0 / 18.0}};
  }
  const double a1 = 0.445948490915965, w1 = 0.223381589678011;
  const double a2 = 0.091576213509771, w2 = 0.109951743655322;
  const double b1 = 1.0 - 2.0 * a1, b2 = 1.0 - 2.0 * a2;
  return {{{b1, a1, a1}, w1}, {{a1, b1, a1}, w1}, {{a1, a1, b1}, w1},
          {{b2, a2, a2}, w2}, {{a2, b2, a2}, w2}, {{a2, a2, b2}, w2}};
}

struct ElementGeometry {
  double measure = 0.0;
  std::array<Point, 3> grads{};  // constant shape-function gradients
};

inline ElementGeometry element_geometry(const Mesh& mesh, std::size_t e) {
  ElementGeometry g;
  const auto& el = mesh.elements[e];
  g.measure = mesh.element_measure(e);
  if (mesh.dim == 1) {
    g.grads[0] = Point(-1.0 / g.measure, 0.0);
    g.grads[1] = Point(1.0 / g.measure, 0.0);
    return g;
  }
  const Point& p0 = mesh.nodes[el[0]];
  const Point& p1 = mesh.nodes[el[1]];
  const Point& p2 = mesh.nodes[el[2]];
  const double two_area = 2.0 * g.measure;
  g.grads[0] = Point(p1.y() - p2.y(), p2.x() - p1.x()) / two_area;
  g.grads[1] = Point(p2.y() - p0.y(), p0.x() - p2.x()) / two_area;
  g.grads[2] = Point(p0.y() - p1.y(), p1.x() - p0.x()) / two_area;
  return g;
}

inline Point map_point(const Mesh& mesh, std::size_t e, const std::array<double, 3>& bary) {
  const auto& el = mesh.elements[e];
  Point x = Point::Zero();
  for (int a = 0; a < mesh.nodes_per_element(); ++a)
    x += bary[static_cast<std::size_t>(a)] * mesh.nodes[el[static_cast<std::size_t>(a)]];
  return x;
}

// D grad(phi) for a real gradient, truncated to the spatial dimension.
inline Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, 2, 1> apply_factor(const SmallCMatrix& d,
                                                                 const Point& grad, int dim) {
  Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, 2, 1> g(dim);
  for (int s = 0; s < dim; ++s) g(s) = grad(s);
  return d * g;
}

// ---------------------------------------------------------------------------
// Degrees of freedom

/// Map between mesh nodes and free degrees of freedom (nodes off the closure of S).
class DofMap {
 public:
  DofMap() = default;
  explicit DofMap(const Mesh& mesh) : DofMap(mesh.constrained_mask()) {}
  explicit DofMap(const std::vector<bool>& constrained) : node_to_dof_(constrained.size(), -1) {
    for (std::size_t i = 0; i < constrained.size(); ++i) {
      if (constrained[i]) {
        constrained_.push_back(i);
      } else {
        node_to_dof_[i] = static_cast<long>(free_.size());
        free_.push_back(i);
      }
    }
  }

  std::size_t num_nodes() const { return node_to_dof_.size(); }
  std::size_t num_free() const { return free_.size(); }
  const std::vector<std::size_t>& free_nodes() const { return free_; }
  const std::vector<std::size_t>& constrained_nodes() const { return constrained_; }
  long dof_of(std::size_t node) const { return node_to_dof_[node]; }

  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> reduce(
      const Eigen::MatrixBase<Derived>& full) const {
    const auto n = static_cast<Eigen::Index>(free_.size());
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        out(i, j) = full(static_cast<Eigen::Index>(free_[static_cast<std::size_t>(i)]),
                         static_cast<Eigen::Index>(free_[static_cast<std::size_t>(j)]));
    return out;
  }

  CVector reduce_vector(const CVector& full) const {
    CVector out(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t i = 0; i < free_.size(); ++i)
      out(static_cast<Eigen::Index>(i)) = full(static_cast<Eigen::Index>(free_[i]));
    return out;
  }

  /// Nodal vector with zeros reinstated on the constrained nodes.
  CVector expand(const CVector& reduced) const {
    CVector out = CVector::Zero(static_cast<Eigen::Index>(node_to_dof_.size()));
    for (std::size_t i = 0; i < free_.size(); ++i)
      out(static_cast<Eigen::Index>(free_[i])) = reduced(static_cast<Eigen::Index>(i));
    return out;
  }

 private:
  std::vector<long> node_to_dof_;
  std::vector<std::size_t> free_;
  std::vector<std::size_t> constrained_;
};

// ---------------------------------------------------------------------------
// Element loops (full nodal numbering)

/// L2 mass matrix, exact element formulas.
inline RMatrix assemble_mass(const Mesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  RMatrix m = RMatrix::Zero(n, n);
  const int npe = mesh.nodes_per_element();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const double meas = mesh.element_measure(e);
    // 1D: meas/6 [2 1; 1 2]; 2D: meas/12 [2 1 1; 1 2 1; 1 1 2]
    const double denom = mesh.dim == 1 ? 6.0 : 12.0;
    const auto& el = mesh.elements[e];
    for (int a = 0; a < npe; ++a)
      for (int b = 0; b < npe; ++b)
        m(static_cast<Eigen::Index>(el[static_cast<std::size_t>(a)]),
          static_cast<Eigen::Index>(el[static_cast<std::size_t>(b)])) +=
            meas * (a == b ? 2.0 : 1.0) / denom;
  }
  return m;
}

/// Matrix of (phi_j, phi_i)_+ over all nodes:
///   sum_l int (D_l phi_j) conj(D_l phi_i) + int a00 phi_j phi_i
///   + int_{boundary minus S} (b00/b1) phi_j phi_i.
/// The principal part is assembled through D so it is Hermitian PSD for any
/// positive semidefinite A.
inline CMatrix assemble_plus_form(const Mesh& mesh, const ProblemSpec& spec,
                                  const FactorizedPrincipal& factorized) {
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  CMatrix k = CMatrix::Zero(n, n);
  const int npe = mesh.nodes_per_element();
  const int dim = mesh.dim;
  const auto rule = element_rule(dim);
  using LocalVec = Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, 2, 1>;

  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry geo = element_geometry(mesh, e);
    const auto& el = mesh.elements[e];
    for (const QuadraturePoint& qp : rule) {
      const Point x = map_point(mesh, e, qp.bary);
      const double w = qp.weight * geo.measure;
      const SmallCMatrix d = factorized.factor(x);
      std::array<LocalVec, 3> dgrad;
      for (int a = 0; a < npe; ++a)
        dgrad[static_cast<std::size_t>(a)] = apply_factor(d, geo.grads[static_cast<std::size_t>(a)], dim);
      const double a00 = spec.zero_order_a00 ? spec.zero_order_a00(x) : 0.0;
      for (int a = 0; a < npe; ++a) {      // test function i
        for (int b = 0; b < npe; ++b) {    // trial function j
          const auto ua = static_cast<std::size_t>(a);
          const auto ub = static_cast<std::size_t>(b);
          cd val = dgrad[ua].dot(dgrad[ub]);  // conj(D phi_i) . D phi_j
          val += a00 * qp.bary[ua] * qp.bary[ub];
          k(static_cast<Eigen::Index>(el[ua]), static_cast<Eigen::Index>(el[ub])) += w * val;
        }
      }
    }
  }

  for (const Facet& f : mesh.facets) {
    if (f.tag == FacetTag::S) continue;
    if (f.node_count == 1) {
      const auto i = static_cast<Eigen::Index>(f.nodes[0]);
      k(i, i) += robin_ratio(spec, mesh.nodes[f.nodes[0]]);
      continue;
    }
    const double g = 0.5 / std::sqrt(3.0);
    const std::array<double, 2> s = {0.5 - g, 0.5 + g};
    for (double t : s) {
      const Point x = (1.0 - t) * mesh.nodes[f.nodes[0]] + t * mesh.nodes[f.nodes[1]];
      const double ratio = robin_ratio(spec, x);
      const std::array<double, 2> phi = {1.0 - t, t};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          k(static_cast<Eigen::Index>(f.nodes[static_cast<std::size_t>(a)]),
            static_cast<Eigen::Index>(f.nodes[static_cast<std::size_t>(b)])) +=
              0.5 * f.measure * ratio * phi[static_cast<std::size_t>(a)] * phi[static_cast<std::size_t>(b)];
    }
  }
  return k;
}

/// Matrix of ((sum_l a_l D_l + delta a0) phi_j, phi_i)_{L2} over all nodes.
inline CMatrix assemble_first_order(const Mesh& mesh, const ProblemSpec& spec,
                                    const FactorizedPrincipal& factorized) {
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  CMatrix c = CMatrix::Zero(n, n);
  const int npe = mesh.nodes_per_element();
  const int dim = mesh.dim;
  const auto rule = element_rule(dim);
  const bool has_first = !spec.first_order.empty();
  if (has_first && static_cast<int>(spec.first_order.size()) != factorized.rows) {
    throw Error(ErrorCode::ConfigError, "discretization",
                "number of first-order coefficients must equal the rows of D");
  }

  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry geo = element_geometry(mesh, e);
    const auto& el = mesh.elements[e];
    for (const QuadraturePoint& qp : rule) {
      const Point x = map_point(mesh, e, qp.bary);
      const double w = qp.weight * geo.measure;
      const cd da0 = spec.zero_order_delta_a0 ? spec.zero_order_delta_a0(x) : cd(0.0);
      std::array<cd, 3> transport{};  // sum_l a_l (D grad phi_b)_l
      if (has_first) {
        const SmallCMatrix d = factorized.factor(x);
        for (int b = 0; b < npe; ++b) {
          const auto dg = apply_factor(d, geo.grads[static_cast<std::size_t>(b)], dim);
          cd s = 0.0;
          for (int l = 0; l < factorized.rows; ++l) s += spec.first_order[static_cast<std::size_t>(l)](x) * dg(l);
          transport[static_cast<std::size_t>(b)] = s;
        }
      }
      for (int a = 0; a < npe; ++a) {
        for (int b = 0; b < npe; ++b) {
          const auto ua = static_cast<std::size_t>(a);
          const auto ub = static_cast<std::size_t>(b);
          const cd val = (transport[ub] + da0 * qp.bary[ub]) * qp.bary[ua];
          c(static_cast<Eigen::Index>(el[ua]), static_cast<Eigen::Index>(el[ub])) += w * val;
        }
      }
    }
  }
  return c;
}

/// F[i] = int f(x,t) phi_i(x) dx over all nodes.
inline CVector assemble_load(const Mesh& mesh, const SpaceTimeField& f, double t) {
  CVector load = CVector::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
  if (!f) return load;
  const auto rule = element_rule(mesh.dim);
  const int npe = mesh.nodes_per_element();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const double meas = mesh.element_measure(e);
    const auto& el = mesh.elements[e];
    for (const QuadraturePoint& qp : rule) {
      const cd fx = f(map_point(mesh, e, qp.bary), t) * (qp.weight * meas);
      for (int a = 0; a < npe; ++a)
        load(static_cast<Eigen::Index>(el[static_cast<std::size_t>(a)])) += fx * qp.bary[static_cast<std::size_t>(a)];
    }
  }
  return load;
}

/// Nodal interpolant of a field.
inline CVector interpolate(const Mesh& mesh, const ComplexField& u) {
  CVector out(static_cast<Eigen::Index>(mesh.num_nodes()));
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
    out(static_cast<Eigen::Index>(i)) = u ? u(mesh.nodes[i]) : cd(0.0);
  return out;
}

/// || u_h - u ||_{L2} for a nodal P1 field u_h against an exact field.
inline double l2_error(const Mesh& mesh, const CVector& nodal, const ComplexField& exact) {
  const auto rule = accurate_rule(mesh.dim);
  const int npe = mesh.nodes_per_element();
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const double meas = mesh.element_measure(e);
    const auto& el = mesh.elements[e];
    for (const QuadraturePoint& qp : rule) {
      cd uh = 0.0;
      for (int a = 0; a < npe; ++a)
        uh += qp.bary[static_cast<std::size_t>(a)] * nodal(static_cast<Eigen::Index>(el[static_cast<std::size_t>(a)]));
      sum += qp.weight * meas * std::norm(uh - exact(map_point(mesh, e, qp.bary)));
    }
  }
  return std::sqrt(sum);
}

// ---------------------------------------------------------------------------
// Reduced system

/// Reduced (free-dof) matrices of the discrete problem.
struct AssembledForms {
  DofMap dofs;
  CMatrix K_plus;  // (u,v)_+ = v^* K_plus u
  RMatrix M;       // L2 mass
  CMatrix C;       // lower-order form
  std::size_t N = 0;
};

/// Remove rows/columns of nodes on the closure of S. Throws
/// ConstraintOnAllDofs if nothing is left.
template <typename Derived>
auto apply_S_constraints(const Eigen::MatrixBase<Derived>& full, const DofMap& dofs) {
  if (dofs.num_free() == 0)
    throw Error(ErrorCode::ConstraintOnAllDofs, "discretization", "no free degrees of freedom");
  return dofs.reduce(full);
}

inline CVector apply_S_constraints(const CVector& full, const DofMap& dofs) {
  if (dofs.num_free() == 0)
    throw Error(ErrorCode::ConstraintOnAllDofs, "discretization", "no free degrees of freedom");
  return dofs.reduce_vector(full);
}

inline AssembledForms assemble_forms(const Mesh& mesh, const ProblemSpec& spec,
                                     const FactorizedPrincipal& factorized) {
  AssembledForms forms;
  forms.dofs = DofMap(mesh);
  forms.K_plus = apply_S_constraints(assemble_plus_form(mesh, spec, factorized), forms.dofs);
  forms.M = apply_S_constraints(assemble_mass(mesh), forms.dofs);
  forms.C = apply_S_constraints(assemble_first_order(mesh, spec, factorized), forms.dofs);
  forms.N = forms.dofs.num_free();
  return forms;
}

// ---------------------------------------------------------------------------
// Dual norm

/// Discrete ||F||_- = sqrt(F^* K_plus^{-1} F), the exact supremum of
/// |v^* F| / ||v||_+ over the discrete space. Factorises K_plus once.
class DualNorm {
 public:
  explicit DualNorm(const CMatrix& k_plus) {
    try {
      solver_ = CholeskySolver(k_plus);
    } catch (const Error&) {
      throw Error(ErrorCode::SingularKPlus, "discretization", "K_plus is not positive definite");
    }
  }

  double squared(const CVector& f) const {
    if (f.size() == 0) return 0.0;
    return std::max(0.0, f.dot(solver_.solve(f)).real());
  }
  double operator()(const CVector& f) const { return std::sqrt(squared(f)); }

 private:
  CholeskySolver solver_;
};

inline double dual_norm(const CVector& f, const CMatrix& k_plus) { return DualNorm(k_plus)(f); }

}  // namespace ncpar
