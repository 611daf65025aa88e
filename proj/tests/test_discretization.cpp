#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ncpar/assembly.hpp"
#include "ncpar/mesh.hpp"
#include "support.hpp"

using namespace ncpar;
using ncpar::testing::problem_with;

namespace {

const FacetSelector kNone = [](const Point&) { return false; };
const FacetSelector kAll = [](const Point&) { return true; };

FactorizedPrincipal factor_of(const ProblemSpec& spec) {
  return factorize_principal(spec, spec.domain.interior_samples(4));
}

}  // namespace

// ---------------------------------------------------------------------------
// Mesh

TEST(Mesh, IntervalCounts) {
  const Mesh m = build_mesh(Domain::interval(0, 1), 4, kNone);
  EXPECT_EQ(m.num_nodes(), 5u);
  EXPECT_EQ(m.num_elements(), 4u);
  EXPECT_EQ(m.facets.size(), 2u);
  EXPECT_EQ(m.facets[0].normal.x(), -1.0);
}

TEST(Mesh, DiskPerimeterIsInscribedPolygon) {
  for (int k : {8, 16, 64}) {
    const Mesh m = build_mesh(Domain::unit_disk_polygon(k), 4, kNone);
    EXPECT_NEAR(m.boundary_measure(), 2.0 * k * std::sin(std::numbers::pi / k), 1e-12);
    double area = 0.0;
    for (std::size_t e = 0; e < m.num_elements(); ++e) area += m.element_measure(e);
    EXPECT_NEAR(area, Domain::unit_disk_polygon(k).measure(), 1e-12);
  }
  const Mesh fine = build_mesh(Domain::unit_disk_polygon(256), 3, kNone);
  EXPECT_NEAR(fine.boundary_measure(), 2.0 * std::numbers::pi, 1e-3);
}

TEST(Mesh, AlwaysTrueSelectorTagsEveryFacet) {
  const Mesh m = build_mesh(Domain::rectangle(0, 2, 0, 1), 3, kAll);
  EXPECT_EQ(m.facets.size(), 12u);
  for (const Facet& f : m.facets) EXPECT_EQ(f.tag, FacetTag::S);
  const auto mask = m.constrained_mask();
  EXPECT_EQ(std::count(mask.begin(), mask.end(), true), 12);
}

TEST(Mesh, RectangleAreaAndOrientation) {
  const Mesh m = build_mesh(Domain::rectangle(0, 2, 0, 1), 5, kNone);
  double area = 0.0;
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    EXPECT_GT(m.element_measure(e), 0.0);
    area += m.element_measure(e);
  }
  EXPECT_NEAR(area, 2.0, 1e-13);
  EXPECT_NEAR(m.boundary_measure(), 6.0, 1e-13);
  for (const Facet& f : m.facets) EXPECT_NEAR(f.normal.dot(f.midpoint - Point(1.0, 0.5)) > 0, 1, 0);
}

TEST(Mesh, InvalidInputsRejected) {
  EXPECT_THROW(build_mesh(Domain::interval(1, 0), 4, kNone), Error);
  EXPECT_THROW(build_mesh(Domain::interval(0, 1), 1, kNone), Error);
  // Too many rings for a coarse polygon would put inner nodes outside it.
  EXPECT_THROW(build_mesh(Domain::unit_disk_polygon(6), 40, kNone), Error);
}

TEST(Mesh, CsvHeaders) {
  const Mesh m = build_mesh(Domain::rectangle(0, 1, 0, 1), 2, kNone);
  EXPECT_EQ(nodes_csv(m).substr(0, 7), "id,x,y\n");
  EXPECT_EQ(elements_csv(m).substr(0, 12), "id,n0,n1,n2\n");
  EXPECT_EQ(facets_csv(m).substr(0, 13), "id,n0,n1,tag\n");
  const Mesh l = build_mesh(Domain::interval(0, 1), 2, kAll);
  EXPECT_EQ(facets_csv(l), "id,n0,tag\n0,0,S\n1,2,S\n");
}

// ---------------------------------------------------------------------------
// Mass

TEST(Mass, OneDimensionalElementMatrix) {
  const Mesh m = build_mesh(Domain::interval(0, 1), 1 << 2, kNone);
  const RMatrix mass = assemble_mass(m);
  const double h = 0.25;
  EXPECT_NEAR(mass(0, 0), h / 3.0, 1e-15);
  EXPECT_NEAR(mass(0, 1), h / 6.0, 1e-15);
  EXPECT_NEAR(mass(2, 2), 2.0 * h / 3.0, 1e-15);
}

TEST(Mass, PartitionOfUnity) {
  const Mesh r = build_mesh(Domain::rectangle(0, 2, 0, 1), 7, kNone);
  EXPECT_NEAR(assemble_mass(r).sum(), 2.0, 1e-12);
  const Mesh d = build_mesh(Domain::unit_disk_polygon(32), 4, kNone);
  EXPECT_NEAR(assemble_mass(d).sum(), Domain::unit_disk_polygon(32).measure(), 1e-12);
  const RMatrix mass = assemble_mass(d);
  EXPECT_LT((mass - mass.transpose()).cwiseAbs().maxCoeff(), 1e-16);
}

// ---------------------------------------------------------------------------
// Plus form

TEST(PlusForm, OneDimensionalStiffnessIsTridiagonal) {
  const int n = 8;
  const ProblemSpec spec = problem_with({});
  const Mesh m = build_mesh(spec.domain, n, spec.dirichlet_set);
  const AssembledForms f = assemble_forms(m, spec, factor_of(spec));
  ASSERT_EQ(f.N, static_cast<std::size_t>(n - 1));
  const double h = 1.0 / n;
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    for (Eigen::Index j = 0; j < n - 1; ++j) {
      const double expect = i == j ? 2.0 / h : (std::abs(i - j) == 1 ? -1.0 / h : 0.0);
      EXPECT_NEAR(f.K_plus(i, j).real(), expect, 1e-11);
      EXPECT_EQ(f.K_plus(i, j).imag(), 0.0);
    }
  }
}

TEST(PlusForm, ZeroPrincipalWithUnitPotentialIsMass) {
  const ProblemSpec spec = problem_with({{"principal", "scalar(0)"}, {"a0", "1"}, {"dirichlet", "all"}});
  const Mesh m = build_mesh(spec.domain, 6, spec.dirichlet_set);
  const CMatrix k = assemble_plus_form(m, spec, factor_of(spec));
  EXPECT_LT(max_abs(CMatrix(k - assemble_mass(m).cast<cd>())), 1e-15);
}

TEST(PlusForm, DiskIsHermitianPsdAndHasBoundaryMass) {
  const ProblemSpec spec = ncpar::testing::disk_problem();
  const Mesh m = build_mesh(spec.domain, 3, spec.dirichlet_set);
  const CMatrix k = assemble_plus_form(m, spec, factor_of(spec));
  EXPECT_LT(hermitian_residual(k), 1e-13);
  // The constant has zero gradient, so only the boundary mass sees it.
  const CVector one = CVector::Ones(k.rows());
  EXPECT_NEAR(one.dot(k * one).real(), m.boundary_measure(), 1e-12);
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(k);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}

TEST(PlusForm, DiskAnnihilatesHolomorphicPolynomialsToSecondOrder) {
  std::vector<double> ratios;
  for (int res : {4, 8, 16}) {
    // Boundary sides grow with the rings so the mesh width is uniform in h.
    const ProblemSpec spec = problem_with({{"domain", "unit_disk_polygon(" + std::to_string(8 * res) + ")"},
                                           {"principal", "paper_disk"},
                                           {"dirichlet", "none"},
                                           {"b0", "0"}});
    const Mesh m = build_mesh(spec.domain, res, spec.dirichlet_set);
    const FactorizedPrincipal fp = factor_of(spec);
    const CMatrix k = assemble_plus_form(m, spec, fp);
    ProblemSpec laplace = spec;
    laplace.principal = [](const Point&) { return SmallCMatrix(SmallCMatrix::Identity(2, 2)); };
    const CMatrix stiff = assemble_plus_form(m, laplace, factor_of(laplace));
    const CVector z = interpolate(m, [](const Point& p) { return cd(p.x(), p.y()); });
    const CVector z2 = interpolate(m, [](const Point& p) { return cd(p.x(), p.y()) * cd(p.x(), p.y()); });
    const double rel1 = std::abs(z.dot(k * z)) / std::abs(z.dot(stiff * z));
    const double rel2 = std::abs(z2.dot(k * z2)) / std::abs(z2.dot(stiff * z2));
    EXPECT_LT(rel1, 1e-12);  // linear functions are reproduced exactly
    ratios.push_back(rel2);
  }
  EXPECT_LT(ratios[1], ratios[0] / 3.0);
  EXPECT_LT(ratios[2], ratios[1] / 3.0);
}

// ---------------------------------------------------------------------------
// First order

TEST(FirstOrder, ZeroCoefficientsGiveZero) {
  const ProblemSpec spec = problem_with({});
  const Mesh m = build_mesh(spec.domain, 5, spec.dirichlet_set);
  EXPECT_EQ(max_abs(assemble_first_order(m, spec, factor_of(spec))), 0.0);
}

TEST(FirstOrder, ConstantPotentialIsScaledMass) {
  const cd c(-2, 1);
  const ProblemSpec spec = problem_with({{"a0", "-2+1i"}});
  const Mesh m = build_mesh(spec.domain, 5, spec.dirichlet_set);
  const CMatrix cm = assemble_first_order(m, spec, factor_of(spec));
  EXPECT_LT(max_abs(CMatrix(cm - c * assemble_mass(m).cast<cd>())), 1e-15);
}

TEST(FirstOrder, ConvectionOnThreeElements) {
  const ProblemSpec spec = problem_with({{"first_order", "1"}, {"dirichlet", "none"}});
  const Mesh m = build_mesh(spec.domain, 3, spec.dirichlet_set);
  const CMatrix c = assemble_first_order(m, spec, factor_of(spec));
  // int phi_j' phi_i: rows (-1/2, 1/2) at the ends and (-1/2, 0, 1/2) inside.
  RMatrix expect = RMatrix::Zero(4, 4);
  expect << -0.5, 0.5, 0, 0,  //
      -0.5, 0, 0.5, 0,        //
      0, -0.5, 0, 0.5,        //
      0, 0, -0.5, 0.5;
  EXPECT_LT(max_abs(CMatrix(c - expect.cast<cd>())), 1e-14);
  const RVector column_sums = c.real().colwise().sum().transpose();
  EXPECT_NEAR(column_sums(0), -1.0, 1e-14);
  EXPECT_NEAR(column_sums(3), 1.0, 1e-14);
  EXPECT_NEAR(column_sums(1), 0.0, 1e-14);
}

TEST(FirstOrder, CoefficientCountMustMatch) {
  ProblemSpec spec = problem_with({});
  spec.first_order = {[](const Point&) { return cd(1); }, [](const Point&) { return cd(1); }};
  const Mesh m = build_mesh(spec.domain, 3, spec.dirichlet_set);
  EXPECT_THROW(assemble_first_order(m, spec, factor_of(spec)), Error);
}

// ---------------------------------------------------------------------------
// Load and constraints

TEST(Load, ZeroUnitAndBasisFunction) {
  const Mesh m = build_mesh(Domain::interval(0, 1), 10, kNone);
  EXPECT_EQ(assemble_load(m, [](const Point&, double) { return cd(0); }, 0.0).norm(), 0.0);
  const CVector one = assemble_load(m, [](const Point&, double) { return cd(1); }, 0.0);
  for (Eigen::Index i = 1; i < 10; ++i) EXPECT_NEAR(one(i).real(), 0.1, 1e-15);
  const RMatrix mass = assemble_mass(m);
  const CVector col = assemble_load(
      m, [](const Point& x, double) { return cd(std::max(0.0, 1.0 - std::abs(x.x() - 0.3) / 0.1)); },
      0.0);
  EXPECT_LT((col - mass.col(3).cast<cd>()).norm(), 1e-14);
}

TEST(Constraints, ReductionAndExpansion) {
  const Mesh none = build_mesh(Domain::interval(0, 1), 6, kNone);
  EXPECT_EQ(DofMap(none).num_free(), 7u);
  const Mesh both = build_mesh(Domain::interval(0, 1), 6, kAll);
  const DofMap dofs(both);
  EXPECT_EQ(dofs.num_free(), 5u);
  CVector v(7);
  for (Eigen::Index i = 0; i < 7; ++i) v(i) = cd(i, -i);
  const CVector back = dofs.expand(apply_S_constraints(v, dofs));
  EXPECT_EQ(back(0), cd(0));
  EXPECT_EQ(back(6), cd(0));
  for (Eigen::Index i = 1; i < 6; ++i) EXPECT_EQ(back(i), v(i));
  const Mesh tiny = build_mesh(Domain::interval(0, 1), 2, kAll);
  EXPECT_EQ(DofMap(tiny).num_free(), 1u);
  const Mesh square = build_mesh(Domain::rectangle(0, 1, 0, 1), 2, kAll);
  EXPECT_EQ(DofMap(square).num_free(), 1u);
  const Mesh rect = build_mesh(Domain::rectangle(0, 1, 0, 1), 1 + 1, kAll);
  (void)rect;
  std::vector<bool> all(3, true);
  EXPECT_THROW(apply_S_constraints(CVector::Ones(3), DofMap(all)), Error);
}

// ---------------------------------------------------------------------------
// Dual norm

TEST(DualNorm, TrivialCases) {
  const CMatrix id = CMatrix::Identity(4, 4);
  EXPECT_EQ(dual_norm(CVector::Zero(4), id), 0.0);
  CVector f(4);
  f << cd(1, 2), cd(-1, 0), cd(0, 3), cd(0.5, 0.5);
  EXPECT_NEAR(dual_norm(f, id), f.norm(), 1e-14);
  EXPECT_THROW(DualNorm(CMatrix(-id)), Error);
}

TEST(DualNorm, MatchesMonteCarloSupremum) {
  const ProblemSpec spec = problem_with({{"dirichlet", "left"}});
  const Mesh m = build_mesh(spec.domain, 6, spec.dirichlet_set);
  const AssembledForms forms = assemble_forms(m, spec, factor_of(spec));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const auto n = static_cast<Eigen::Index>(forms.N);
  CVector f(n);
  for (Eigen::Index i = 0; i < n; ++i) f(i) = cd(g(rng), g(rng));
  const double exact = dual_norm(f, forms.K_plus);
  // Random directions concentrated near the maximiser K^{-1} F.
  const CVector best = forms.K_plus.partialPivLu().solve(f);
  double sup = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    CVector v = best;
    for (Eigen::Index i = 0; i < n; ++i) v(i) += 0.05 * best.norm() * cd(g(rng), g(rng));
    const double num = std::norm(v.dot(f));
    sup = std::max(sup, num / v.dot(forms.K_plus * v).real());
  }
  EXPECT_LE(std::sqrt(sup), exact * (1.0 + 1e-12));
  EXPECT_GE(std::sqrt(sup), 0.95 * exact);
}

TEST(L2Error, ExactForLinearField) {
  const Mesh m = build_mesh(Domain::rectangle(0, 1, 0, 2), 3, kNone);
  const ComplexField lin = [](const Point& x) { return cd(2 * x.x() - x.y(), x.y()); };
  EXPECT_LT(l2_error(m, interpolate(m, lin), lin), 1e-14);
  EXPECT_NEAR(l2_error(m, CVector::Zero(static_cast<Eigen::Index>(m.num_nodes())),
                       [](const Point&) { return cd(1); }),
              std::sqrt(2.0), 1e-14);
}
