#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace ktk;
using ktk::testkit::C;
using ktk::testkit::X;

TEST(Rational, AlwaysReduced) {
  Rational r(6, -4);
  EXPECT_EQ(r.num_str(), "-3");
  EXPECT_EQ(r.den_str(), "2");
  Rational z(0, 7);
  EXPECT_EQ(z.num_str(), "0");
  EXPECT_EQ(z.den_str(), "1");
  EXPECT_THROW(Rational(1, 0), std::domain_error);
  EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
}

TEST(Rational, Parse) {
  EXPECT_EQ(Rational::parse("-10/4"), Rational(-5, 2));
  EXPECT_EQ(Rational::parse("7"), Rational(7));
  EXPECT_THROW(Rational::parse("x/2"), std::invalid_argument);
}

TEST(Rational, BigValuesStayExact) {
  Rational a = Rational(factorial(40));
  Rational b = a / Rational(factorial(38));
  EXPECT_EQ(b, Rational(40 * 39));
}

TEST(Binomial, EdgeCases) {
  EXPECT_EQ(binomial(5, 2), 10);
  EXPECT_EQ(binomial(5, -1), 0);
  EXPECT_EQ(binomial(3, 4), 0);
  EXPECT_EQ(binomial(0, 0), 1);
}

TEST(PolyAdd, Examples) {
  const std::size_t m = 2;
  EXPECT_TRUE(poly_add(X(m, 0), -X(m, 0)).is_zero());
  EXPECT_EQ(poly_add(X(m, 0) + X(m, 1), X(m, 1)), X(m, 0) + X(m, 1) * Rational(2));
  Poly a = X(m, 0) * X(m, 0) * Rational(3, 2), b = X(m, 0) * X(m, 0) * Rational(1, 2);
  EXPECT_EQ(poly_add(a, b), X(m, 0) * X(m, 0) * Rational(2));
}

TEST(PolyAdd, DimensionMismatch) { EXPECT_THROW(poly_add(X(2, 0), X(3, 0)), std::invalid_argument); }

TEST(PolyMul, Examples) {
  const std::size_t m = 2;
  Poly x1 = X(m, 0), x2 = X(m, 1);
  EXPECT_EQ(poly_mul(x1, x2).str(), "x1*x2");
  EXPECT_EQ(poly_mul(x1 + x2, x1 - x2), x1 * x1 - x2 * x2);
  Poly r2 = x1 * x1 + x2 * x2;
  EXPECT_EQ(poly_mul(r2, r2), x1 * x1 * x1 * x1 + x1 * x1 * x2 * x2 * Rational(2) + x2 * x2 * x2 * x2);
  EXPECT_THROW(poly_mul(x1, X(3, 0)), std::invalid_argument);
}

TEST(PolyDiff, Examples) {
  const std::size_t m = 2;
  Poly x1 = X(m, 0), x2 = X(m, 1);
  EXPECT_EQ(poly_diff(x1 * x1 * x2, 0), x1 * x2 * Rational(2));
  EXPECT_TRUE(poly_diff(x1, 1).is_zero());
  EXPECT_EQ(poly_diff(x1 * x1 + x2 * x2, 0), x1 * Rational(2));
  EXPECT_THROW(poly_diff(x1, 2), std::out_of_range);
}

TEST(Poly, GradedLexOrder) {
  const std::size_t m = 2;
  Poly p = X(m, 1) * X(m, 1) + X(m, 0) * X(m, 1) + X(m, 0) * X(m, 0) + X(m, 1) + X(m, 0) + C(m, 1);
  EXPECT_EQ(p.str(), "1 + x1 + x2 + x1^2 + x1*x2 + x2^2");
  EXPECT_EQ(p.degree(), 2);
  EXPECT_EQ(Poly(m).degree(), -1);
}

TEST(Poly, MonomialEnumerationCounts) {
  for (std::size_t m = 1; m <= 4; ++m)
    for (int d = 0; d <= 5; ++d)
      EXPECT_EQ(BigInt(static_cast<unsigned long>(monomials_of_degree(m, d).size())),
                binomial(d + static_cast<long>(m) - 1, static_cast<long>(m) - 1));
}

TEST(PolyProperty, RingAxioms) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + trial % 4;
    Poly a = testkit::random_poly(rng, m, 3), b = testkit::random_poly(rng, m, 3), c = testkit::random_poly(rng, m, 2);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_TRUE((a - a).is_zero());
    if (!a.is_zero() && !b.is_zero()) {
      EXPECT_EQ((a * b).degree(), a.degree() + b.degree());
    }
  }
}

TEST(PolyProperty, DiffIsDerivation) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + trial % 4;
    Poly a = testkit::random_poly(rng, m, 3), b = testkit::random_poly(rng, m, 3);
    for (std::size_t ax = 0; ax < m; ++ax)
      EXPECT_EQ(poly_diff(a * b, ax), poly_diff(a, ax) * b + a * poly_diff(b, ax));
  }
}
