#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ktk/equations.hpp"
#include "ktk/solver.hpp"
#include "ktk/tensors.hpp"

namespace ktk {

// ---------------------------------------------------------------------------
// Counting formulas
// ---------------------------------------------------------------------------

namespace detail {
inline BigInt exact_div(const BigInt& a, const BigInt& b) {
  if (a % b != 0) throw std::logic_error("counting formula: non-integral quotient");
  return a / b;
}
}  // namespace detail

/// Number of independent Killing tensors of rank j (order 1) in m dimensions:
/// (1/m) C(j+m-1, m-1) C(j+m, m-1).
inline BigInt killing_count(int m, int j) {
  if (m < 1 || j < 0) throw std::invalid_argument("killing_count: need m >= 1, j >= 0");
  return detail::exact_div(binomial(j + m - 1, m - 1) * binomial(j + m, m - 1), m);
}

/// Rank j, order s: (s/m) C(j+m-1, m-1) C(j+s+m-1, m-1).
inline BigInt killing_order_count(int m, int j, int s) {
  if (m < 1 || j < 0 || s < 1) throw std::invalid_argument("killing_order_count: need m >= 1, j >= 0, s >= 1");
  return detail::exact_div(BigInt(s) * binomial(j + m - 1, m - 1) * binomial(j + s + m - 1, m - 1), m);
}

/// Conformal Killing tensors of rank j, order s, for m = 3, 4.
inline BigInt conformal_order_count(int m, int j, int s) {
  if (j < 0 || s < 1) throw std::invalid_argument("conformal_order_count: need j >= 0, s >= 1");
  if (m <= 2) throw InfiniteFamilyError("conformal Killing tensors in dimension <= 2 form an infinite family");
  const BigInt J = j, S = s;
  if (m == 3) return detail::exact_div(S * (2 * J + 1) * (2 * J + 2 * S + 1) * (2 * J + S + 1), 6);
  if (m == 4) return detail::exact_div(S * (J + 1) * (J + 1) * (J + S + 1) * (J + S + 1) * (2 * J + 2 + S), 12);
  throw std::invalid_argument("conformal_order_count: closed form known only for m = 3, 4");
}

inline BigInt conformal_count(int m, int j) { return conformal_order_count(m, j, 1); }

/// Linearly independent symmetry operators of order n of the massive
/// equation: ranks n and n-1 contribute.
inline BigInt symmetry_operator_count(int m, int n) {
  if (n < 0) throw std::invalid_argument("symmetry_operator_count: n >= 0");
  return killing_count(m, n) + (n >= 1 ? killing_count(m, n - 1) : BigInt(0));
}

/// Massless case: cumulative conformal counts over ranks 0..n.
inline BigInt conformal_symmetry_operator_count(int m, int n) {
  BigInt total = 0;
  for (int j = 0; j <= n; ++j) total += conformal_count(m, j);
  return total;
}

enum class CountKind { ordinary, conformal, symmetry_operator, symmetry_operator_conformal };

inline std::string to_string(CountKind k) {
  switch (k) {
    case CountKind::ordinary: return "ordinary";
    case CountKind::conformal: return "conformal";
    case CountKind::symmetry_operator: return "symmetry-operator";
    case CountKind::symmetry_operator_conformal: return "symmetry-operator-conformal";
  }
  return "?";
}

inline CountKind count_kind_from_string(const std::string& s) {
  if (s == "ordinary") return CountKind::ordinary;
  if (s == "conformal") return CountKind::conformal;
  if (s == "symmetry-operator") return CountKind::symmetry_operator;
  if (s == "symmetry-operator-conformal") return CountKind::symmetry_operator_conformal;
  throw std::invalid_argument("unknown count kind '" + s + "'");
}

/// Dispatcher over the closed forms. For the operator kinds `j` is the
/// operator order n and `s` is ignored.
inline BigInt count(CountKind kind, int m, int j, int s = 1) {
  switch (kind) {
    case CountKind::ordinary: return killing_order_count(m, j, s);
    case CountKind::conformal: return conformal_order_count(m, j, s);
    case CountKind::symmetry_operator: return symmetry_operator_count(m, j);
    case CountKind::symmetry_operator_conformal: return conformal_symmetry_operator_count(m, j);
  }
  throw std::invalid_argument("count: bad kind");
}

// ---------------------------------------------------------------------------
// Seed bases
// ---------------------------------------------------------------------------

/// m translations followed by the m(m-1)/2 rotations and boosts
/// F^a = g^{aa}(δ_{aμ} x^ν - δ_{aν} x^μ), μ < ν.
inline Basis killing_vectors(Signature sig) {
  const std::size_t m = sig.dim();
  Basis b;
  b.kind = Kind::ordinary;
  b.j = 1;
  b.s = 1;
  b.signature = sig;
  b.degree_bound = 1;
  for (std::size_t a = 0; a < m; ++a) {
    SymTensorField t(1, sig);
    t.set(SymMultiIndex{static_cast<int>(a)}, Poly(m, Rational(1)));
    b.elements.push_back(std::move(t));
  }
  for (std::size_t mu = 0; mu < m; ++mu)
    for (std::size_t nu = mu + 1; nu < m; ++nu) {
      SymTensorField r(1, sig);
      r.set(SymMultiIndex{static_cast<int>(mu)}, Poly::variable(m, nu) * Rational(sig.metric(mu)));
      r.set(SymMultiIndex{static_cast<int>(nu)}, Poly::variable(m, mu) * Rational(-sig.metric(nu)));
      b.elements.push_back(std::move(r));
    }
  return b;
}

inline SymTensorField dilation_vector(Signature sig) {
  SymTensorField d(1, sig);
  for (std::size_t a = 0; a < sig.dim(); ++a) d.set(SymMultiIndex{static_cast<int>(a)}, Poly::variable(sig.dim(), a));
  return d;
}

/// x^2 λ^a - 2 x^a (λ·x) for λ the unit vector along `axis`.
inline SymTensorField special_conformal_vector(Signature sig, std::size_t axis) {
  const std::size_t m = sig.dim();
  const Poly x2 = x_squared(sig);
  const Poly lx = lowered_coordinate(sig, axis);
  SymTensorField f(1, sig);
  for (std::size_t a = 0; a < m; ++a) {
    Poly c = Poly::variable(m, a) * lx * Rational(-2);
    if (a == axis) c += x2;
    f.set(SymMultiIndex{static_cast<int>(a)}, std::move(c));
  }
  return f;
}

/// Killing vectors, the dilation, and m special conformal vectors:
/// (m+1)(m+2)/2 elements.
inline Basis conformal_vectors(Signature sig) {
  if (sig.dim() <= 2) throw InfiniteFamilyError("conformal_vectors: the conformal algebra is infinite for m <= 2");
  Basis b = killing_vectors(sig);
  b.kind = Kind::conformal;
  b.degree_bound = 2;
  b.elements.push_back(dilation_vector(sig));
  for (std::size_t a = 0; a < sig.dim(); ++a) b.elements.push_back(special_conformal_vector(sig, a));
  return b;
}

// ---------------------------------------------------------------------------
// Lemma constructions
// ---------------------------------------------------------------------------

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Symmetrised product of a Killing tensor with a Killing vector.
inline SymTensorField lemma1_product(const SymTensorField& f, const SymTensorField& v) {
  if (v.rank() != 1) throw PreconditionError("lemma1_product: second factor must be a vector");
  if (!killing_residual(f, 1).is_zero()) throw PreconditionError("lemma1_product: first factor is not Killing");
  if (!killing_residual(v, 1).is_zero()) throw PreconditionError("lemma1_product: vector is not Killing");
  return sym_product(f, v);
}

/// Traceless part of the symmetrised product of a conformal Killing tensor
/// with a conformal Killing vector.
inline SymTensorField lemma2_product(const SymTensorField& f, const SymTensorField& v) {
  if (v.rank() != 1) throw PreconditionError("lemma2_product: second factor must be a vector");
  if (!is_traceless(f) || !conformal_residual(f, 1).is_zero())
    throw PreconditionError("lemma2_product: first factor is not conformal Killing");
  if (!conformal_residual(v, 1).is_zero()) throw PreconditionError("lemma2_product: vector is not conformal Killing");
  return traceless_project(sym_product(f, v));
}

inline bool is_affine(const Poly& phi) { return phi.degree() <= 1; }

/// φ·F for affine φ. The result solves the order-(s+1) system; it stays
/// order s only when φ is constant.
inline SymTensorField lemma3_scale(const SymTensorField& f, int s, const Poly& phi) {
  if (!is_affine(phi)) throw PreconditionError("lemma3_scale: phi is not affine");
  if (!killing_residual(f, s).is_zero()) throw PreconditionError("lemma3_scale: F is not a Killing tensor of order s");
  return phi * f;
}

/// F^{a_1..a_{j-1} b} x_b: rank j-1, order s+1.
inline SymTensorField lemma4_contract(const SymTensorField& f, int s) {
  if (f.rank() < 1) throw PreconditionError("lemma4_contract: rank 0 field");
  if (!killing_residual(f, s).is_zero()) throw PreconditionError("lemma4_contract: F is not a Killing tensor of order s");
  return contract_x(f);
}

/// Returns λ when ∂^μ∂^ν φ = λ g^{μν} with constant λ, nothing otherwise.
inline std::optional<Rational> conformal_hessian_factor(const Poly& phi, Signature sig) {
  const std::size_t m = sig.dim();
  std::optional<Rational> lambda;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a; b < m; ++b) {
      Poly h = raised_diff(raised_diff(phi, sig, a), sig, b);
      if (a != b) {
        if (!h.is_zero()) return std::nullopt;
        continue;
      }
      if (h.degree() > 0) return std::nullopt;
      Rational v = h.coeff(Monomial(m)) * Rational(sig.metric(a));
      if (lambda && !(*lambda == v)) return std::nullopt;
      lambda = v;
    }
  return lambda ? lambda : Rational(0);
}

/// φ·F for a conformal Killing tensor of order s and φ with pure-trace
/// Hessian; the result is a conformal Killing tensor of order s+1.
inline SymTensorField lemma5_scale(const SymTensorField& f, int s, const Poly& phi) {
  if (!conformal_hessian_factor(phi, f.signature()))
    throw PreconditionError("lemma5_scale: Hessian of phi is not proportional to the metric");
  if (!is_traceless(f) || !conformal_residual(f, s).is_zero())
    throw PreconditionError("lemma5_scale: F is not a conformal Killing tensor of order s");
  return phi * f;
}

// ---------------------------------------------------------------------------
// Order-s bases from the lemma pipeline
// ---------------------------------------------------------------------------

/// A basis produced from lemma constructions, with provenance.
struct ConstructedBasis {
  Basis basis;
  std::size_t candidates = 0;
  BigInt expected;              // closed-form count
  bool matches_count = false;   // generated dimension == expected
  bool solver_fallback = false; // basis replaced by the solver output
};

namespace detail {

/// Greedy maximal independent subset, preserving candidate order.
inline std::vector<SymTensorField> independent_subset(const std::vector<SymTensorField>& cands, int rank_j,
                                                      Signature sig) {
  int deg = 0;
  for (const auto& f : cands) deg = std::max(deg, f.degree());
  FieldCoordinates coords(rank_j, sig, std::max(deg, 0));
  // Incremental echelon over the coordinate vectors.
  std::vector<std::pair<std::size_t, RationalVector>> echelon;  // (pivot, row) with row[pivot] = 1
  std::vector<SymTensorField> out;
  for (const auto& f : cands) {
    if (f.is_zero()) continue;
    RationalVector v = coords.coordinates(f);
    for (const auto& [piv, row] : echelon) {
      if (v[piv].is_zero()) continue;
      Rational c = v[piv];
      for (std::size_t i = 0; i < v.size(); ++i)
        if (!row[i].is_zero()) v[i] -= c * row[i];
    }
    std::size_t piv = 0;
    while (piv < v.size() && v[piv].is_zero()) ++piv;
    if (piv == v.size()) continue;
    Rational inv = Rational(1) / v[piv];
    for (auto& x : v) x *= inv;
    for (auto& [p2, row] : echelon) {
      if (row[piv].is_zero()) continue;
      Rational c = row[piv];
      for (std::size_t i = 0; i < row.size(); ++i)
        if (!v[i].is_zero()) row[i] -= c * v[i];
    }
    echelon.emplace_back(piv, std::move(v));
    out.push_back(f);
  }
  return out;
}

/// Order-1 seeds: symmetrised (and for conformal, trace-free) products of j
/// seed vectors; the rank-0 seed is the constant 1.
inline std::vector<SymTensorField> order_one_candidates(Kind kind, int j, Signature sig) {
  const std::size_t m = sig.dim();
  if (j == 0) return {SymTensorField::scalar(sig, Poly(m, Rational(1)))};
  Basis vecs = kind == Kind::ordinary ? killing_vectors(sig) : conformal_vectors(sig);
  std::vector<SymTensorField> out;
  std::vector<std::size_t> pick(static_cast<std::size_t>(j), 0);
  auto rec = [&](auto&& self, std::size_t pos, std::size_t lo, const SymTensorField& acc) -> void {
    if (pos == pick.size()) {
      out.push_back(kind == Kind::ordinary ? acc : traceless_project(acc));
      return;
    }
    for (std::size_t i = lo; i < vecs.elements.size(); ++i) {
      SymTensorField next = pos == 0 ? vecs.elements[i] : sym_product(acc, vecs.elements[i]);
      self(self, pos + 1, i, next);
    }
  };
  rec(rec, 0, 0, SymTensorField(0, sig));
  return out;
}

class OrderSBuilder {
 public:
  OrderSBuilder(Kind kind, Signature sig) : kind_(kind), sig_(sig) {}

  const std::vector<SymTensorField>& basis(int j, int s) {
    auto key = std::make_pair(j, s);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<SymTensorField> cands = candidates(j, s);
    last_candidates_ = cands.size();
    return memo_[key] = independent_subset(cands, j, sig_);
  }
  std::size_t last_candidates() const { return last_candidates_; }

 private:
  std::vector<SymTensorField> candidates(int j, int s) {
    const std::size_t m = sig_.dim();
    if (s == 1) return order_one_candidates(kind_, j, sig_);
    std::vector<SymTensorField> out = basis(j, s - 1);
    std::vector<SymTensorField> lower = out;
    if (kind_ == Kind::ordinary) {
      for (std::size_t a = 0; a < m; ++a)
        for (const auto& f : lower) out.push_back(lemma3_scale(f, s - 1, Poly::variable(m, a)));
      for (const auto& f : basis(j + 1, s - 1)) out.push_back(lemma4_contract(f, s - 1));
      // Free solutions: every field of degree < s.
      for (const auto& mono : monomials_up_to(m, s - 1))
        for (const auto& idx : enumerate_indices(j, m)) {
          SymTensorField unit(j, sig_);
          unit.set(idx, Poly(mono, 1));
          out.push_back(std::move(unit));
        }
    } else {
      std::vector<Poly> phis;
      for (std::size_t a = 0; a < m; ++a) phis.push_back(Poly::variable(m, a));
      phis.push_back(x_squared(sig_));
      for (const auto& phi : phis)
        for (const auto& f : lower) out.push_back(lemma5_scale(f, s - 1, phi));
    }
    return out;
  }

  Kind kind_;
  Signature sig_;
  std::map<std::pair<int, int>, std::vector<SymTensorField>> memo_;
  std::size_t last_candidates_ = 0;
};

}  // namespace detail

/// Generates an order-s basis from the lemma constructions and extracts a
/// maximal independent subset. When the generated dimension falls short of
/// the closed-form count the solver basis is returned instead and
/// `solver_fallback` is set.
inline ConstructedBasis build_order_s_basis(Kind kind, int j, int s, Signature sig) {
  if (sig.dim() > 4) throw std::invalid_argument("build_order_s_basis: supported for m <= 4");
  if (j < 0 || s < 1) throw std::invalid_argument("build_order_s_basis: need j >= 0, s >= 1");
  const int m = static_cast<int>(sig.dim());
  ConstructedBasis out;
  out.expected = kind == Kind::ordinary ? killing_order_count(m, j, s) : conformal_order_count(m, j, s);
  detail::OrderSBuilder builder(kind, sig);
  const auto& elems = builder.basis(j, s);
  out.candidates = builder.last_candidates();
  out.basis.kind = kind;
  out.basis.j = j;
  out.basis.s = s;
  out.basis.signature = sig;
  out.basis.elements = elems;
  int deg = 0;
  for (const auto& f : elems) deg = std::max(deg, f.degree());
  out.basis.degree_bound = deg;
  out.matches_count = BigInt(static_cast<unsigned long>(elems.size())) == out.expected;
  if (!out.matches_count) {
    out.solver_fallback = true;
    out.basis = solve_basis(AnsatzSpec{kind, j, s, sig, std::nullopt});
  }
  return out;
}

}  // namespace ktk
