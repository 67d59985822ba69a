#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace ktk;

namespace {

RationalMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, int zero_percent) {
  RationalMatrix m(r, c);
  std::uniform_int_distribution<int> pct(0, 99);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < c; ++k)
      if (pct(rng) >= zero_percent) m(i, k) = testkit::random_rational(rng, 4);
  return m;
}

/// Low-rank matrix: product of random r x k and k x c factors.
RationalMatrix low_rank(std::mt19937& rng, std::size_t r, std::size_t c, std::size_t k) {
  RationalMatrix a = random_matrix(rng, r, k, 30), b = random_matrix(rng, k, c, 30), out(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      for (std::size_t t = 0; t < k; ++t) out(i, j) += a(i, t) * b(t, j);
  return out;
}

}  // namespace

TEST(Nullspace, Identity) { EXPECT_TRUE(nullspace(RationalMatrix::identity(3)).empty()); }

TEST(Nullspace, ZeroMatrix) {
  auto ns = nullspace(RationalMatrix(2, 4));
  ASSERT_EQ(ns.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(ns[i][k], Rational(i == k ? 1 : 0));
}

TEST(Nullspace, RankOne) {
  auto ns = nullspace(RationalMatrix{{1, 1}, {2, 2}});
  ASSERT_EQ(ns.size(), 1u);
  EXPECT_EQ(ns[0][0], Rational(1));
  EXPECT_EQ(ns[0][1], Rational(-1));
}

TEST(Nullspace, CanonicalEchelonShape) {
  // x0 + 2 x2 = 0, x1 - x2 + x3 = 0. Leading entries sit at the lowest
  // columns, so columns 0 and 1 are the free ones.
  auto ns = nullspace(RationalMatrix{{1, 0, 2, 0}, {0, 1, -1, 1}});
  ASSERT_EQ(ns.size(), 2u);
  EXPECT_EQ(ns[0], (RationalVector{Rational(1), Rational(0), Rational(-1, 2), Rational(-1, 2)}));
  EXPECT_EQ(ns[1], (RationalVector{Rational(0), Rational(1), Rational(0), Rational(-1)}));
}

TEST(NullspaceProperty, AnnihilatesAndHasRightDimension) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 120; ++trial) {
    std::size_t r = 1 + trial % 7, c = 1 + (trial * 3) % 9;
    RationalMatrix m = trial % 2 ? random_matrix(rng, r, c, 50) : low_rank(rng, r, c, 1 + trial % 3);
    auto ns = nullspace(m);
    const std::size_t rk = bareiss_rank(m);
    EXPECT_EQ(ns.size(), c - rk);
    for (const auto& v : ns)
      for (const auto& x : m.apply(v)) EXPECT_TRUE(x.is_zero());
    EXPECT_EQ(rank_of_vectors(ns, c), ns.size());
  }
}

TEST(RankProperty, SparseAgreesWithDenseBareiss) {
  std::mt19937 rng(22);
  for (int trial = 0; trial < 150; ++trial) {
    std::size_t r = 1 + trial % 8, c = 1 + (trial * 5) % 8;
    RationalMatrix m = trial % 3 ? random_matrix(rng, r, c, 40) : low_rank(rng, r, c, 1 + trial % 4);
    EXPECT_EQ(rank(SparseMatrix::from_dense(m)), bareiss_rank(m));
  }
}

TEST(Rank, ProlongationMatrixBothRoutes) {
  for (int j = 0; j <= 2; ++j)
    for (int k = 0; k <= j; ++k) {
      auto sys = prolong(j, k, 1, Signature(2, 1));
      EXPECT_EQ(rank(sys.matrix), bareiss_rank(sys.matrix.to_dense())) << "j=" << j << " k=" << k;
    }
}

TEST(ParticularSolution, ConsistentAndInconsistent) {
  SparseMatrix a = SparseMatrix::from_dense(RationalMatrix{{1, 1}, {2, 2}});
  auto x = particular_solution(a, {Rational(3), Rational(6)});
  ASSERT_TRUE(x);
  EXPECT_EQ(a.apply(*x), (RationalVector{Rational(3), Rational(6)}));
  EXPECT_FALSE(particular_solution(a, {Rational(3), Rational(5)}));
  EXPECT_THROW(particular_solution(a, {Rational(1)}), std::invalid_argument);
}

TEST(ParticularSolutionProperty, SolvesRandomSystems) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t r = 1 + trial % 6, c = 1 + (trial * 7) % 6;
    RationalMatrix m = low_rank(rng, r, c, 1 + trial % 3);
    RationalVector x0(c);
    for (auto& v : x0) v = testkit::random_rational(rng);
    RationalVector b = m.apply(x0);
    auto x = particular_solution(SparseMatrix::from_dense(m), b);
    ASSERT_TRUE(x);
    EXPECT_EQ(m.apply(*x), b);
  }
}

TEST(Inverse, RoundTrip) {
  RationalMatrix a{{2, 1}, {1, 1}};
  RationalMatrix inv = a.inverse();
  EXPECT_EQ(inv(0, 0), Rational(1));
  EXPECT_EQ(inv(0, 1), Rational(-1));
  EXPECT_EQ(inv(1, 1), Rational(2));
  EXPECT_THROW((RationalMatrix{{1, 2}, {2, 4}}).inverse(), std::domain_error);
}

TEST(Rref, UniqueForm) {
  auto r = rref_rows({{Rational(2), Rational(4), Rational(0)}, {Rational(1), Rational(2), Rational(1)}});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0], (RationalVector{Rational(1), Rational(2), Rational(0)}));
  EXPECT_EQ(r[1], (RationalVector{Rational(0), Rational(0), Rational(1)}));
}
