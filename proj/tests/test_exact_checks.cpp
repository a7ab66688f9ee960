#include <gtest/gtest.h>

#include <cmath>

#include "rotex/exact_checks.hpp"

using namespace rotex;

namespace {

const std::vector<Rational> kAlphas{Rational(0), Rational(1, 2), Rational(-3, 4)};

}  // namespace

TEST(ParseRational, Forms) {
  EXPECT_EQ(parse_rational("1/2"), Rational(1, 2));
  EXPECT_EQ(parse_rational("-3/4"), Rational(-3, 4));
  EXPECT_EQ(parse_rational("0.7"), Rational(7, 10));
  EXPECT_EQ(parse_rational("-0.75"), Rational(-3, 4));
  EXPECT_EQ(parse_rational("-.5"), Rational(-1, 2));
  EXPECT_EQ(parse_rational("2"), Rational(2));
  EXPECT_EQ(parse_rational("1.25"), Rational(5, 4));
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/x"), std::invalid_argument);
}

TEST(Invariance, HoldsExactlyOnN3) {
  for (const auto& a : kAlphas) {
    const auto r = verify_invariance(3, a);
    EXPECT_TRUE(r.pass) << r.max_violation;
    EXPECT_EQ(r.max_violation, 0.0);
    EXPECT_EQ(r.instances, 512u);
  }
}

TEST(Invariance, FailsUnderDocumentedMutation) {
  const auto r = verify_invariance(3, Rational(1, 2), documented_mutation("invariance"));
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.max_violation, 0.0);
  // Zero alpha makes every mutation vanish.
  EXPECT_TRUE(verify_invariance(3, Rational(0), RateMutation::DoubleMainDiagonal).pass);
}

TEST(FaceIdentity, TableByHand) {
  const Rational a(1, 2);
  const auto rows = face_identity_table(a);
  ASSERT_EQ(rows.size(), 16u);
  for (const auto& row : rows) {
    EXPECT_EQ(row.anticlockwise, row.clockwise) << row.pattern;
    if (row.pattern == kDiagonalMain || row.pattern == kDiagonalAnti) {
      EXPECT_EQ(row.anticlockwise, 2 * a);
    } else if (row.pattern == 0 || row.pattern == 15) {
      EXPECT_EQ(row.anticlockwise, Rational(0));
    }
  }
  // Adjacent pair (1,1,0,0): one particle can rotate into a diagonal on each side.
  EXPECT_EQ(rows[0b0011].anticlockwise, a);
  for (const auto& al : kAlphas) EXPECT_TRUE(verify_face_identity(al).pass);
  EXPECT_FALSE(verify_face_identity(a, documented_mutation("face-identity")).pass);
}

TEST(CurrentStructure, ExhaustiveOnN3) {
  for (const auto& a : kAlphas) EXPECT_TRUE(verify_current_structure(3, a).pass);
  EXPECT_TRUE(verify_current_structure(3, Rational(7, 10)).pass);
  EXPECT_FALSE(verify_current_structure(3, Rational(7, 10), documented_mutation("current-structure")).pass);
}

TEST(CurrentStructure, HarmonicPartVanishes) {
  for (double a : {0.0, 0.5, -0.75}) {
    const auto r = verify_current_harmonic_part(3, a);
    EXPECT_TRUE(r.pass) << r.max_violation;
    EXPECT_LE(r.max_violation, 1e-10);
  }
  EXPECT_FALSE(verify_current_harmonic_part(3, 0.7, documented_mutation("current-harmonic")).pass);
}

TEST(Expectations, GrandcanonicalBasics) {
  const BigRational rho(BigRational(3) / 10);
  EXPECT_EQ(grandcanonical_expectation([](std::uint32_t) { return BigRational(1); }, 5, rho), BigRational(1));
  EXPECT_EQ(grandcanonical_expectation([](std::uint32_t m) { return BigRational(m & 1U); }, 3, rho), rho);
  EXPECT_THROW(grandcanonical_expectation([](std::uint32_t) { return BigRational(1); }, 21, rho), std::invalid_argument);
}

// E[g] = alpha P(diagonal) = alpha * 2 rho^2 (1 - rho)^2 by counting the two
// activated patterns.
TEST(Expectations, FaceWeightClosedForm) {
  for (const auto& a : kAlphas) {
    for (int k = 0; k <= 10; ++k) {
      const BigRational rho(BigRational(k) / 10);
      const BigRational m = rho * (1 - rho);
      EXPECT_EQ(expected_face_weight(a, rho), 2 * to_big(a) * m * m);
      EXPECT_EQ(expected_squared_gradient(rho), 2 * m);
      EXPECT_EQ(mixed_expectation(a, rho), BigRational(0));
    }
  }
  EXPECT_EQ(expected_face_weight(Rational(1, 2), BigRational(1) / 2), BigRational(1) / 16);
}

TEST(Expectations, CoefficientChecks) {
  for (const auto& a : kAlphas) {
    EXPECT_TRUE(verify_coefficients(a).pass);
    EXPECT_TRUE(verify_closed_forms(a).pass);
  }
  EXPECT_FALSE(verify_coefficients(Rational(1, 2), documented_mutation("coefficients")).pass);
  EXPECT_FALSE(verify_closed_forms(Rational(1, 2), documented_mutation("closed-forms")).pass);
}

TEST(Dirichlet, IdentityHoldsForAllTestDensities) {
  for (double alpha : {0.0, 0.5})
    for (double rho : {0.3, 0.5}) {
      const auto r = verify_dirichlet_identity(3, rho, alpha);
      EXPECT_TRUE(r.pass) << r.max_violation;
      EXPECT_EQ(r.instances, 3u * 512u);
    }
  EXPECT_FALSE(verify_dirichlet_identity(3, 0.3, 0.5, documented_mutation("dirichlet")).pass);
}

// A function of the particle number is conserved, so both sides vanish.
TEST(Dirichlet, ConservedDensityGivesZero) {
  const auto densities = dirichlet_test_densities(3);
  ASSERT_EQ(densities.size(), 3u);
  const auto s = dirichlet_sides(3, 0.4, 0.5, densities[0].fn);
  EXPECT_NEAR(s.generator_side, 0.0, 1e-15);
  EXPECT_NEAR(s.dirichlet_side, 0.0, 1e-15);
  const auto t = dirichlet_sides(3, 0.4, 0.5, densities[2].fn);
  EXPECT_GT(t.dirichlet_side, 1e-3);
  EXPECT_THROW(dirichlet_sides(3, 0.0, 0.5, densities[0].fn), std::domain_error);
}

TEST(DetailedBalance, BrokenOnlyForNonzeroAlpha) {
  EXPECT_FALSE(detailed_balance_witness(3, Rational(0)).has_value());
  const auto w = detailed_balance_witness(3, Rational(1, 2));
  ASSERT_TRUE(w.has_value());
  EXPECT_NE(w->forward, w->backward);
}

TEST(Checks, RuntimeBudgetOnN3) {
  EXPECT_LT(verify_invariance(3, Rational(1, 2)).runtime_seconds, 5.0);
  EXPECT_LT(verify_face_identity(Rational(1, 2)).runtime_seconds, 1.0);
  EXPECT_THROW(detail::configuration_count(6), std::invalid_argument);
}
