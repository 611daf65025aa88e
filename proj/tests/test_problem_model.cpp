#include <gtest/gtest.h>

#include <cmath>

#include "ncpar/problem.hpp"
#include "support.hpp"

using namespace ncpar;
using ncpar::testing::problem_with;

namespace {

ProblemSpec planar(const std::string& principal) {
  return problem_with({{"domain", "rectangle(0,1,0,1)"}, {"principal", principal}});
}

ErrorCode validation_error(const ProblemSpec& spec) {
  try {
    validate_coefficients(spec);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "validation passed";
  return ErrorCode::ConfigError;
}

}  // namespace

TEST(Validate, IdentityPassesEverything) {
  const ValidationReport r = validate_coefficients(planar("identity"));
  EXPECT_NEAR(r.ellipticity, 1.0, 1e-14);
  EXPECT_NEAR(r.min_complex_eigenvalue, 1.0, 1e-14);
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.coercive);
}

TEST(Validate, DegenerateDiskMatrix) {
  const ValidationReport r = validate_coefficients(ncpar::testing::disk_problem());
  EXPECT_NEAR(r.ellipticity, 1.0, 1e-10);
  EXPECT_NEAR(r.min_complex_eigenvalue, 0.0, 1e-10);
  EXPECT_TRUE(r.positive);
  EXPECT_FALSE(r.coercive);
  EXPECT_GE(r.min_random_form, -1e-12);
}

TEST(Validate, IndefiniteMatrixRejected) {
  EXPECT_EQ(validation_error(planar("matrix(1,1,0,2)")), ErrorCode::NotPositiveSemidefinite);
}

TEST(Validate, NonEllipticRejected) {
  EXPECT_EQ(validation_error(planar("diag(1,0)")), ErrorCode::NotElliptic);
}

TEST(Validate, NonHermitianRejected) {
  ProblemSpec spec = planar("identity");
  spec.principal = [](const Point&) {
    SmallCMatrix a(2, 2);
    a << 1.0, cd(0, 1), cd(0, 1), 1.0;
    return a;
  };
  EXPECT_EQ(validation_error(spec), ErrorCode::NonHermitian);
}

TEST(Validate, NegativeRobinRatioRejected) {
  // The split never produces a negative ratio; only directly supplied b00 can.
  ProblemSpec spec = problem_with({{"dirichlet", "none"}});
  spec.boundary_b00 = [](const Point&) { return -1.0; };
  EXPECT_EQ(validation_error(spec), ErrorCode::ConfigError);
  spec = problem_with({{"dirichlet", "none"}, {"b0", "1"}, {"b1", "-1"}});
  EXPECT_GE(robin_ratio(spec, Point(0, 0)), 0.0);
}

TEST(Validate, NonPositiveFinalTimeRejected) {
  EXPECT_EQ(validation_error(problem_with({{"final_time", "0"}})), ErrorCode::ConfigError);
}

TEST(Split, NonnegativeDataUnchanged) {
  const A0Split a = split_a0(1.0);
  EXPECT_EQ(a.a00, 1.0);
  EXPECT_EQ(a.delta_a0, cd(0.0));
  const B0Split b = split_b0(1.0, 1.0);
  EXPECT_EQ(b.b00, 1.0);
  EXPECT_EQ(b.delta_b0, cd(0.0));
}

TEST(Split, NegativeRealPartGoesToPerturbation) {
  const A0Split a = split_a0(cd(-2, 1));
  EXPECT_EQ(a.a00, 0.0);
  EXPECT_EQ(a.delta_a0, cd(-2, 1));
}

TEST(Split, ImaginaryPartGoesToPerturbation) {
  const A0Split a = split_a0(cd(3, -1));
  EXPECT_EQ(a.a00, 3.0);
  EXPECT_EQ(a.delta_a0, cd(0, -1));
  EXPECT_EQ(a.a00 + a.delta_a0, cd(3, -1));
}

TEST(Split, ZeroB1Throws) {
  try {
    split_b0(1.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DivisionByZeroB1);
  }
}

TEST(Split, FieldsSumBack) {
  const ProblemSpec spec = problem_with({{"a0", "-1.5+2i"}, {"b0", "0.5-1i"}, {"b1", "2"}});
  const Point x(0.3, 0.0);
  EXPECT_EQ(spec.zero_order_a00(x) + spec.zero_order_delta_a0(x), cd(-1.5, 2));
  EXPECT_EQ(spec.boundary_b00(x) + spec.boundary_delta_b0(x), cd(0.5, -1));
  EXPECT_DOUBLE_EQ(robin_ratio(spec, x), 0.25);
}

TEST(Factorize, Identity) {
  const ProblemSpec spec = planar("identity");
  const FactorizedPrincipal f = factorize_principal(spec, spec.domain.interior_samples(4));
  const SmallCMatrix d = f.factor(Point(0.5, 0.5));
  EXPECT_LT(max_abs(CMatrix(d - SmallCMatrix::Identity(2, 2))), 1e-14);
}

TEST(Factorize, DiskMatrixIsHalfSqrtTwo) {
  const ProblemSpec spec = ncpar::testing::disk_problem();
  const FactorizedPrincipal f = factorize_principal(spec, spec.domain.interior_samples(4));
  const SmallCMatrix a = spec.principal(Point(0, 0));
  // A^2 = 2A, so A/sqrt(2) squares to A.
  EXPECT_LT(max_abs(CMatrix(f.factor(Point(0, 0)) - a / std::sqrt(2.0))), 1e-12);
  EXPECT_LT(f.residual_bound, 1e-12);
}

TEST(Factorize, DiagonalPsd) {
  const ProblemSpec spec = planar("identity");
  SmallCMatrix a = SmallCMatrix::Zero(2, 2);
  a(0, 0) = 4.0;
  const SmallCMatrix d = hermitian_sqrt(a);
  EXPECT_NEAR(d(0, 0).real(), 2.0, 1e-14);
  EXPECT_NEAR(std::abs(d(1, 1)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(d(0, 1)), 0.0, 1e-14);
}

TEST(Factorize, ResidualPropertyOnRandomPsd) {
  for (int trial = 0; trial < 20; ++trial) {
    SmallCMatrix b(2, 2);
    b << cd(std::sin(trial), std::cos(3 * trial)), cd(0.3 * trial, -1), cd(1, 0.1 * trial),
        cd(std::cos(trial), 0.5);
    const SmallCMatrix a = b.adjoint() * b;
    const SmallCMatrix d = hermitian_sqrt(a);
    EXPECT_LT(max_abs(CMatrix(d.adjoint() * d - a)), 1e-10 * (1.0 + max_abs(CMatrix(a))));
    EXPECT_LT(hermitian_residual(d), 1e-12);
  }
}

TEST(SmallEigen, ClosedFormMatchesKnownSpectrum) {
  SmallCMatrix a(2, 2);
  a << 1.0, cd(0, 1), cd(0, -1), 1.0;
  const SmallRVector ev = small_hermitian_eigenvalues(a);
  EXPECT_NEAR(ev(0), 0.0, 1e-15);
  EXPECT_NEAR(ev(1), 2.0, 1e-15);
  a << 1.0, cd(0, 2), cd(0, -2), 1.0;
  const SmallRVector ev2 = small_hermitian_eigenvalues(a);
  EXPECT_NEAR(ev2(0), -1.0, 1e-15);
  EXPECT_NEAR(ev2(1), 3.0, 1e-15);
}
