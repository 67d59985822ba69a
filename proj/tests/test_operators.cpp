#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace ktk;
using ktk::testkit::X;

namespace {

WeylOp D(std::size_t m, std::size_t a) { return WeylOp::derivative(m, a); }
WeylOp Xo(std::size_t m, std::size_t a) { return WeylOp::coefficient(X(m, a)); }
WeylOp K(std::size_t m, long n, long d = 1) { return WeylOp(m, Rational(n, d)); }

WeylOp random_op(std::mt19937& rng, std::size_t m, int max_x, int max_d, int terms = 4) {
  WeylOp op(m);
  const auto xs = monomials_up_to(m, max_x);
  const auto ds = monomials_up_to(m, max_d);
  std::uniform_int_distribution<std::size_t> px(0, xs.size() - 1), pd(0, ds.size() - 1);
  for (int t = 0; t < terms; ++t) op.add_term(xs[px(rng)], ds[pd(rng)], ktk::testkit::random_rational(rng));
  return op;
}

Basis solved(Kind kind, int j, Signature sig) { return solve_basis(AnsatzSpec{kind, j, 1, sig, std::nullopt}); }

/// 2 F·∂ + c div F for a vector field F, with div F = Σ ∂F^a/∂x^a.
WeylOp vector_op(const SymTensorField& f, const Rational& c) {
  const std::size_t m = f.dim();
  WeylOp out(m);
  Poly div(m);
  for (std::size_t a = 0; a < m; ++a) {
    const Poly& p = f.at(SymMultiIndex{static_cast<int>(a)});
    out += weyl_mul(WeylOp::coefficient(p), D(m, a)) * Rational(2);
    div += poly_diff(p, a);
  }
  return out + WeylOp::coefficient(div) * c;
}

}  // namespace

TEST(WeylMul, Examples) {
  EXPECT_EQ(weyl_mul(D(1, 0), Xo(1, 0)), weyl_mul(Xo(1, 0), D(1, 0)) + K(1, 1));
  EXPECT_EQ(weyl_mul(Xo(1, 0), D(1, 0)), weyl_mul(Xo(1, 0), D(1, 0)));
  const WeylOp d11 = weyl_mul(D(1, 0), D(1, 0));
  EXPECT_EQ(weyl_mul(d11, Xo(1, 0)), weyl_mul(Xo(1, 0), d11) + D(1, 0) * Rational(2));
  EXPECT_EQ(weyl_mul(D(1, 0), Xo(1, 0)).str(), "1 + x1*d1");
  EXPECT_THROW(weyl_mul(D(1, 0), D(2, 0)), std::invalid_argument);
}

TEST(WeylMul, Associative) {
  std::mt19937 rng(21);
  for (int t = 0; t < 50; ++t) {
    auto a = random_op(rng, 2, 2, 2), b = random_op(rng, 2, 2, 2), c = random_op(rng, 2, 2, 2);
    EXPECT_EQ(weyl_mul(weyl_mul(a, b), c), weyl_mul(a, weyl_mul(b, c)));
  }
}

TEST(WeylMul, OrderAdditive) {
  std::mt19937 rng(22);
  for (int t = 0; t < 100; ++t) {
    auto a = random_op(rng, 3, 2, 2), b = random_op(rng, 3, 2, 2);
    if (a.is_zero() || b.is_zero()) continue;
    EXPECT_EQ(weyl_mul(a, b).order(), a.order() + b.order());
  }
  EXPECT_EQ(WeylOp(2).order(), -1);
}

TEST(Commutator, Examples) {
  EXPECT_EQ(commutator(D(1, 0), Xo(1, 0)), K(1, 1));
  const auto lap = kgf(Signature::euclidean(2), Rational(0)).box();
  const WeylOp rot = weyl_mul(Xo(2, 0), D(2, 1)) - weyl_mul(Xo(2, 1), D(2, 0));
  EXPECT_TRUE(commutator(rot, lap).is_zero());

  const Signature e3 = Signature::euclidean(3);
  const auto box = kgf(e3, Rational(0)).box();
  WeylOp euler(3);
  for (std::size_t a = 0; a < 3; ++a) euler += weyl_mul(Xo(3, a), D(3, a));
  EXPECT_EQ(commutator(euler, box), box * Rational(-2));
  EXPECT_EQ(anticommutator(D(1, 0), Xo(1, 0)), weyl_mul(Xo(1, 0), D(1, 0)) * Rational(2) + K(1, 1));
}

TEST(BuildSymmetryOperator, Examples) {
  const Signature e2 = Signature::euclidean(2);
  EXPECT_EQ(build_symmetry_operator(SymTensorField::scalar(e2, Poly(2, Rational(3)))), K(2, 3));
  auto kv = killing_vectors(e2);
  EXPECT_EQ(build_symmetry_operator(kv.elements[0]), D(2, 0) * Rational(2));
  const auto rot = build_symmetry_operator(kv.elements[2]);
  EXPECT_EQ(rot, (weyl_mul(Xo(2, 1), D(2, 0)) - weyl_mul(Xo(2, 0), D(2, 1))) * Rational(2));
  EXPECT_EQ(rot.str(), "2*x2*d1 - 2*x1*d2");
}

TEST(BuildSymmetryOperator, LeadingTerm) {
  std::mt19937 rng(23);
  const Signature sig(2, 1);
  for (int j = 0; j <= 3; ++j) {
    auto f = ktk::testkit::random_field(rng, j, sig, 2);
    const auto q = build_symmetry_operator(f);
    if (f.is_zero()) continue;
    EXPECT_EQ(q.order(), j);
    // Coefficient of ∂^I in the top order is 2^j (number of orderings of I) F^I.
    for (const auto& [idx, p] : f.components()) {
      Monomial d(sig.dim());
      for (std::size_t i = 0; i < idx.size(); ++i) d.set(idx[i], d[idx[i]] + 1);
      for (const auto& [mono, c] : p.terms())
        EXPECT_EQ(q.coeff(mono, d), c * Rational(BigInt(1L << j)) * Rational(idx.arrangements()));
    }
  }
}

TEST(KGF, Examples) {
  auto a = kgf(Signature(1, 1), Rational(0)).op();
  EXPECT_EQ(a, weyl_mul(D(2, 0), D(2, 0)) - weyl_mul(D(2, 1), D(2, 1)));
  auto b = kgf(Signature(3, 0), Rational(1)).op();
  WeylOp lap(3);
  for (std::size_t i = 0; i < 3; ++i) lap += weyl_mul(D(3, i), D(3, i));
  EXPECT_EQ(b, lap - K(3, 1));
  auto c = kgf(Signature(1, 3), Rational(0));
  EXPECT_EQ(c.op(), c.box());
  EXPECT_EQ(c.box().str(), "d1^2 - d2^2 - d3^2 - d4^2");
  EXPECT_EQ(c.box().order(), 2);
  EXPECT_EQ(c.box().terms().size(), 4u);
}

TEST(DivideByPrincipal, Examples) {
  const Signature e2 = Signature::euclidean(2);
  const auto box = kgf(e2, Rational(0)).box();
  auto a = divide_by_principal(weyl_mul(Xo(2, 0), box), e2);
  EXPECT_EQ(a.alpha, Xo(2, 0));
  EXPECT_TRUE(a.remainder.is_zero());

  auto b = divide_by_principal(D(2, 0), e2);
  EXPECT_TRUE(b.alpha.is_zero());
  EXPECT_EQ(b.remainder, D(2, 0));

  const Signature e3 = Signature::euclidean(3);
  WeylOp euler(3);
  for (std::size_t i = 0; i < 3; ++i) euler += weyl_mul(Xo(3, i), D(3, i));
  auto c = divide_by_principal(commutator(euler, kgf(e3, Rational(0)).box()), e3);
  EXPECT_EQ(c.alpha, K(3, -2));
  EXPECT_TRUE(c.remainder.is_zero());
  EXPECT_THROW(divide_by_principal(D(2, 0), e3), std::invalid_argument);
}

TEST(DivideByPrincipal, Reconstruction) {
  std::mt19937 rng(24);
  for (const Signature sig : ktk::testkit::small_signatures())
    for (const Rational k2 : {Rational(0), Rational(3, 2)})
      for (int t = 0; t < 10; ++t) {
        auto c = random_op(rng, sig.dim(), 2, 4, 6);
        auto div = divide_by_principal(c, sig, k2);
        EXPECT_EQ(weyl_mul(div.alpha, kgf(sig, k2).op()) + div.remainder, c);
        // The remainder is reduced: no ∂ along the last axis to power >= 2.
        for (const auto& [term, _] : div.remainder.terms()) EXPECT_LT(term.d[sig.dim() - 1], 2u);
      }
}

TEST(CheckSymmetry, Examples) {
  for (const Signature sig : ktk::testkit::small_signatures())
    for (const Rational k2 : {Rational(0), Rational(1)})
      for (std::size_t a = 0; a < sig.dim(); ++a) {
        auto r = check_symmetry(D(sig.dim(), a), kgf(sig, k2));
        EXPECT_TRUE(r.is_symmetry);
        EXPECT_TRUE(r.alpha.is_zero());
      }
  const Signature e2 = Signature::euclidean(2);
  auto rot = check_symmetry(build_symmetry_operator(killing_vectors(e2).elements[2]), kgf(e2, Rational(0)));
  EXPECT_TRUE(rot.is_symmetry);
  EXPECT_TRUE(rot.alpha.is_zero());

  EXPECT_EQ(commutator(Xo(2, 0), kgf(e2, Rational(0)).box()), D(2, 0) * Rational(-2));
  auto x1 = check_symmetry(Xo(2, 0), kgf(e2, Rational(0)));
  EXPECT_FALSE(x1.is_symmetry);
  EXPECT_FALSE(x1.remainder.is_zero());
}

TEST(CheckSymmetry, DilationWithMass) {
  // [x·∂, □ - κ²] = -2□ is in the ideal of □ but not of □ - κ² when κ ≠ 0.
  const Signature e3 = Signature::euclidean(3);
  WeylOp euler(3);
  for (std::size_t i = 0; i < 3; ++i) euler += weyl_mul(Xo(3, i), D(3, i));
  EXPECT_TRUE(check_symmetry(euler, kgf(e3, Rational(0))).is_symmetry);
  EXPECT_FALSE(check_symmetry(euler, kgf(e3, Rational(1))).is_symmetry);
}

TEST(OrdinaryOperators, CommuteWithBox) {
  for (const Signature sig : {Signature(2, 0), Signature(1, 1), Signature(3, 0), Signature(2, 1), Signature(1, 3),
                              Signature(4, 0)})
    for (int j = 0; j <= 2; ++j)
      for (const auto& f : solved(Kind::ordinary, j, sig).elements) {
        const auto q = build_symmetry_operator(f);
        EXPECT_TRUE(commutator(q, kgf(sig, Rational(0)).box()).is_zero()) << sig.str() << " " << f.str();
        auto r = check_symmetry(q, kgf(sig, Rational(5, 3)));
        EXPECT_TRUE(r.is_symmetry);
        EXPECT_TRUE(r.alpha.is_zero());
      }
}

TEST(ConformalOperators, BareAnticommutatorNeedsCompletion) {
  for (const Signature sig : {Signature(3, 0), Signature(1, 3)}) {
    const std::size_t m = sig.dim();
    const auto l = kgf(sig, Rational(0));
    for (std::size_t a = 0; a < m; ++a) {
      const auto f = special_conformal_vector(sig, a);
      EXPECT_FALSE(check_symmetry(build_symmetry_operator(f), l).is_symmetry);
      const auto done = conformal_symmetry_operator(f);
      EXPECT_TRUE(check_symmetry(done.op, l).is_symmetry);
      EXPECT_EQ(done.op, vector_op(f, Rational(static_cast<long>(m) - 2, static_cast<long>(m)))) << sig.str() << a;
      EXPECT_EQ(divide_by_principal(commutator(done.op, l.box()), sig).alpha, done.alpha);
    }
    // Dilation: the bare operator already works, with alpha = -2 up to the 2x scale.
    const auto dil = conformal_symmetry_operator(dilation_vector(sig));
    EXPECT_TRUE(check_symmetry(dil.op, l).is_symmetry);
  }
}

TEST(ConformalOperators, CompletedBasesPass) {
  for (const Signature sig : {Signature(3, 0), Signature(2, 1)})
    for (int j = 1; j <= 2; ++j)
      for (const auto& f : solved(Kind::conformal, j, sig).elements) {
        const auto done = conformal_symmetry_operator(f);
        EXPECT_EQ(done.op.order(), j);
        EXPECT_TRUE(check_symmetry(done.op, kgf(sig, Rational(0))).is_symmetry) << f.str();
      }
}

TEST(ConformalOperators, OrdinaryInputUnchanged) {
  const Signature sig(1, 3);
  for (const auto& f : killing_vectors(sig).elements) {
    auto done = complete_symmetry_operator(build_symmetry_operator(f), sig);
    EXPECT_EQ(done.op, build_symmetry_operator(f));
    EXPECT_TRUE(done.alpha.is_zero());
  }
}

TEST(Closure, Examples) {
  std::vector<WeylOp> trans;
  for (std::size_t a = 0; a < 4; ++a) trans.push_back(D(4, a) * Rational(2));
  EXPECT_TRUE(lie_closure_check(trans));
  EXPECT_TRUE(lie_closure_check(vector_operators(killing_vectors(Signature(1, 3)))));
  EXPECT_TRUE(lie_closure_check({D(1, 0), weyl_mul(Xo(1, 0), D(1, 0))}));
  EXPECT_FALSE(lie_closure_check({D(1, 0), weyl_mul(weyl_mul(Xo(1, 0), Xo(1, 0)), D(1, 0))}));
}

TEST(Closure, AllSignaturesOfFour) {
  for (int p = 0; p <= 4; ++p) {
    const Signature sig(p, 4 - p);
    auto table = lie_closure_table(vector_operators(killing_vectors(sig)));
    EXPECT_TRUE(table.closed) << sig.str();
    EXPECT_EQ(table.structure_constants.size(), 45u);
  }
}

TEST(Closure, StructureConstantsReproduceCommutators) {
  const auto gens = vector_operators(killing_vectors(Signature(2, 1)));
  auto table = lie_closure_table(gens);
  ASSERT_TRUE(table.closed);
  for (const auto& e : table.structure_constants) {
    WeylOp sum(3);
    for (std::size_t l = 0; l < gens.size(); ++l) sum += gens[l] * e.coefficients[l];
    EXPECT_EQ(sum, commutator(gens[e.i], gens[e.k]));
  }
}

TEST(Closure, ConformalAlgebra) {
  for (const Signature sig : {Signature(3, 0), Signature(1, 3)}) {
    // Completions are fixed only up to constants, so the order-0 operator 1 joins the generators.
    std::vector<WeylOp> gens{K(sig.dim(), 1)};
    for (const auto& f : conformal_vectors(sig).elements) gens.push_back(conformal_symmetry_operator(f).op);
    EXPECT_TRUE(lie_closure_check(gens)) << sig.str();
    gens.erase(gens.begin());
    EXPECT_FALSE(lie_closure_check(gens));
  }
}

TEST(Enveloping, SecondOrderOperators) {
  for (const Signature sig : {Signature(2, 0), Signature(1, 1), Signature(3, 0), Signature(2, 1)}) {
    const auto gens = vector_operators(killing_vectors(sig));
    for (const auto& f : solved(Kind::ordinary, 2, sig).elements)
      EXPECT_TRUE(in_enveloping_degree2(gens, build_symmetry_operator(f))) << sig.str() << " " << f.str();
  }
  const Signature e2 = Signature::euclidean(2);
  EXPECT_FALSE(in_enveloping_degree2(vector_operators(killing_vectors(e2)), Xo(2, 0)));
}

TEST(SolveInSpan, Basic) {
  auto c = solve_in_span({D(2, 0), D(2, 1)}, D(2, 0) * Rational(3) - D(2, 1));
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ((*c)[0], Rational(3));
  EXPECT_EQ((*c)[1], Rational(-1));
  EXPECT_FALSE(solve_in_span({D(2, 0)}, D(2, 1)).has_value());
}
