#include <gtest/gtest.h>

#include <cmath>

#include "ncpar/estimates.hpp"
#include "support.hpp"

using namespace ncpar;
using ncpar::testing::problem_with;

namespace {

struct Problem {
  ProblemSpec spec;
  Mesh mesh;
  AssembledForms forms;
  EigenBasis basis;

  GalerkinTrajectory solve(Eigen::Index k, int steps, double theta) const {
    return solve_evolution(mesh, spec, forms, basis, {k, steps, theta});
  }
  EstimateReport bounds(const GalerkinTrajectory& t) const {
    const EstimateConstants c = compute_constants(spec);
    return apriori_bounds(t, t.u0_l2_sq, c.c1, c.c2, spec.final_time);
  }
};

Problem make_run(const ProblemSpec& spec, int resolution) {
  Problem r{spec, build_mesh(spec.domain, resolution, spec.dirichlet_set), {}, {}};
  r.forms = assemble_forms(r.mesh, spec, factorize_principal(spec, spec.domain.interior_samples(4)));
  r.basis = generalized_eigenbasis(r.forms.K_plus, r.forms.M);
  return r;
}

}  // namespace

TEST(Constants, ZeroLowerOrder) {
  const EstimateConstants c = compute_constants(problem_with({}));
  EXPECT_EQ(c.c1, 0.0);
  EXPECT_EQ(c.c2, 0.0);
}

TEST(Constants, PotentialModulus) {
  EXPECT_NEAR(compute_constants(problem_with({{"a0", "-2+1i"}})).c2, std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(compute_constants(problem_with({{"a0", "3-1i"}})).c2, 1.0, 1e-15);
}

TEST(Constants, FirstOrderEuclideanNorm) {
  const EstimateConstants c =
      compute_constants(problem_with({{"domain", "rectangle(0,1,0,1)"}, {"first_order", "3;4"}}));
  EXPECT_NEAR(c.c1, 5.0, 1e-15);
}

TEST(Trapezoid, ExactForLinear) {
  EXPECT_NEAR(trapezoid({0.0, 1.0, 2.0, 3.0}, 0.5), 2.25, 1e-15);
  EXPECT_EQ(trapezoid({4.0}, 1.0), 0.0);
}

TEST(Apriori, ZeroDataIsZeroLeqZero) {
  const Problem r = make_run(problem_with({{"initial", "zero"}}), 8);
  const EstimateReport e = r.bounds(r.solve(0, 10, 1.0));
  EXPECT_EQ(e.rhs, 0.0);
  EXPECT_EQ(e.sup_lhs, 0.0);
  EXPECT_TRUE(e.sup_ok);
  EXPECT_TRUE(e.energy_ok);
}

TEST(Apriori, HeatSupIsAttainedAtStart) {
  const Problem r = make_run(problem_with({}), 40);
  const GalerkinTrajectory t = r.solve(0, 50, 0.5);
  const EstimateReport e = r.bounds(t);
  EXPECT_EQ(e.gronwall_factor, 1.0);
  EXPECT_EQ(e.sup_lhs, t.norm_l2_sq.front());
  EXPECT_NEAR(e.sup_lhs, e.u0_l2_sq, 1e-10);
  EXPECT_TRUE(e.sup_ok);
  EXPECT_TRUE(e.energy_ok);
  EXPECT_GE(e.rhs, e.energy_lhs);
}

TEST(Apriori, GrowthCaseHoldsAndFollowsScalarOde) {
  const ProblemSpec spec = problem_with({{"a0", "-5"}, {"dirichlet", "none"}, {"initial", "one"},
                                         {"final_time", "0.5"}});
  const Problem r = make_run(spec, 20);
  const GalerkinTrajectory t = r.solve(0, 200, 1.0);
  const EstimateReport e = r.bounds(t);
  EXPECT_NEAR(e.gronwall_factor, std::exp(10.0 * 0.5), 1e-9);
  EXPECT_GT(t.norm_l2_sq.back(), t.norm_l2_sq.front());
  EXPECT_TRUE(e.sup_ok);
  EXPECT_TRUE(e.energy_ok);

  // k = 1: d g' = -(1 + chat) g, so g(T) = g(0) exp(-(1 + chat) T / d).
  const GalerkinSystem sys = make_galerkin_system(r.forms, r.basis, 1);
  const cd rate = -(1.0 + sys.C_hat(0, 0)) / sys.capacitance(0);
  std::vector<double> errors;
  for (int steps : {100, 200, 400}) {
    const GalerkinTrajectory one = r.solve(1, steps, 1.0);
    const cd exact = one.coefficients.front()(0) * std::exp(rate * spec.final_time);
    errors.push_back(std::abs(one.coefficients.back()(0) - exact) / std::abs(exact));
    EXPECT_TRUE(r.bounds(one).sup_ok);
  }
  EXPECT_NEAR(std::log2(errors[0] / errors[1]), 1.0, 0.1);
  EXPECT_NEAR(std::log2(errors[1] / errors[2]), 1.0, 0.1);
}

TEST(Apriori, RightSideIndependentOfK) {
  const ProblemSpec spec = problem_with({{"source", "1"}, {"first_order", "1"}, {"a0", "-1+2i"}});
  const Problem r = make_run(spec, 30);
  const EstimateReport a = r.bounds(r.solve(5, 40, 1.0));
  const EstimateReport b = r.bounds(r.solve(10, 40, 1.0));
  EXPECT_EQ(a.rhs, b.rhs);
  EXPECT_TRUE(a.sup_ok && a.energy_ok && b.sup_ok && b.energy_ok);
}

TEST(Uniqueness, SignOfHermitianPart) {
  EXPECT_TRUE(check_uniqueness_condition(CMatrix::Zero(3, 3)).holds);
  const UniquenessCheck one = check_uniqueness_condition(CMatrix::Identity(3, 3));
  EXPECT_NEAR(one.min_eig, 1.0, 1e-15);
  EXPECT_TRUE(one.holds);
  const UniquenessCheck minus = check_uniqueness_condition(-CMatrix::Identity(3, 3));
  EXPECT_NEAR(minus.min_eig, -1.0, 1e-15);
  EXPECT_FALSE(minus.holds);
  // Skew-Hermitian perturbations do not matter.
  CMatrix skew(2, 2);
  skew << cd(0, 1), 2.0, -2.0, cd(0, -3);
  EXPECT_NEAR(check_uniqueness_condition(skew).min_eig, 0.0, 1e-15);
}

TEST(Continuity, ConstantTrajectoryHasNoJumps) {
  GalerkinTrajectory t;
  t.dt = 0.1;
  t.norm_l2_sq = {2.0, 2.0, 2.0};
  EXPECT_EQ(check_continuity(t).max_jump, 0.0);
}

TEST(Continuity, JumpsHalveWithTimeStep) {
  for (const std::string source : {"none", "step:5"}) {
    const Problem r = make_run(problem_with({{"source", source}}), 20);
    const double j1 = check_continuity(r.solve(0, 50, 1.0)).max_jump;
    const double j2 = check_continuity(r.solve(0, 100, 1.0)).max_jump;
    const double j3 = check_continuity(r.solve(0, 200, 1.0)).max_jump;
    EXPECT_NEAR(j1 / j2, 2.0, 0.25) << source;
    EXPECT_NEAR(j2 / j3, 2.0, 0.25) << source;
  }
}

TEST(SupDifference, MassWeighted) {
  GalerkinTrajectory a, b;
  a.k = b.k = 2;
  a.coefficients = {CVector::Zero(2), CVector::Ones(2)};
  b.coefficients = {CVector::Zero(2), CVector::Zero(2)};
  RVector d(2);
  d << 1.0, 3.0;
  EXPECT_NEAR(sup_l2_difference(a, b, d), 2.0, 1e-15);
  b.coefficients.pop_back();
  EXPECT_THROW(sup_l2_difference(a, b, d), Error);
}
