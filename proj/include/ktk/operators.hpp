#pragma once

// Differential operators with polynomial coefficients (the Weyl algebra),
// kept in normal order: coefficients to the left of derivatives.

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ktk/linalg.hpp"
#include "ktk/poly.hpp"
#include "ktk/tensors.hpp"

namespace ktk {

/// One normal-ordered term x^x ∂^d.
struct OpTerm {
  Monomial x;
  Monomial d;
  friend bool operator==(const OpTerm&, const OpTerm&) = default;
};

/// Derivative exponents first, then coefficient exponents, both graded-lex.
struct OpTermLess {
  bool operator()(const OpTerm& a, const OpTerm& b) const {
    GradedLex lt;
    if (lt(a.d, b.d)) return true;
    if (lt(b.d, a.d)) return false;
    return lt(a.x, b.x);
  }
};

class WeylOp {
 public:
  using Terms = std::map<OpTerm, Rational, OpTermLess>;

  WeylOp() = default;
  explicit WeylOp(std::size_t dim) : dim_(dim) {}
  WeylOp(std::size_t dim, const Rational& c) : dim_(dim) { add_term(Monomial(dim), Monomial(dim), c); }

  /// Multiplication by a polynomial.
  static WeylOp coefficient(const Poly& p) {
    WeylOp op(p.dim());
    for (const auto& [m, c] : p.terms()) op.add_term(m, Monomial(p.dim()), c);
    return op;
  }
  static WeylOp derivative(std::size_t dim, std::size_t axis) {
    WeylOp op(dim);
    op.add_term(Monomial(dim), Monomial::variable(dim, axis), 1);
    return op;
  }

  std::size_t dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Highest total derivative degree; -1 for the zero operator.
  int order() const { return terms_.empty() ? -1 : terms_.rbegin()->first.d.degree(); }

  Rational coeff(const Monomial& x, const Monomial& d) const {
    auto it = terms_.find(OpTerm{x, d});
    return it == terms_.end() ? Rational() : it->second;
  }

  void add_term(const Monomial& x, const Monomial& d, const Rational& c) {
    if (x.dim() != dim_ || d.dim() != dim_) throw std::invalid_argument("WeylOp: dimension mismatch");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(OpTerm{x, d}, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  WeylOp& operator+=(const WeylOp& o) {
    check(o);
    for (const auto& [t, c] : o.terms_) add_term(t.x, t.d, c);
    return *this;
  }
  WeylOp& operator-=(const WeylOp& o) {
    check(o);
    for (const auto& [t, c] : o.terms_) add_term(t.x, t.d, -c);
    return *this;
  }
  WeylOp& operator*=(const Rational& s) {
    if (s.is_zero()) terms_.clear();
    for (auto& [_, c] : terms_) c *= s;
    return *this;
  }
  friend WeylOp operator+(WeylOp a, const WeylOp& b) { return a += b; }
  friend WeylOp operator-(WeylOp a, const WeylOp& b) { return a -= b; }
  friend WeylOp operator*(WeylOp a, const Rational& s) { return a *= s; }
  friend WeylOp operator*(const Rational& s, WeylOp a) { return a *= s; }
  friend bool operator==(const WeylOp& a, const WeylOp& b) { return a.dim_ == b.dim_ && a.terms_ == b.terms_; }

  void check(const WeylOp& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("WeylOp: dimension mismatch");
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [t, c] : terms_) {
      if (!first) os << (c.sign() < 0 ? " - " : " + ");
      else if (c.sign() < 0) os << "-";
      first = false;
      Rational a = c.sign() < 0 ? -c : c;
      bool bare = t.x.degree() == 0 && t.d.degree() == 0;
      bool star = false;
      if (!(a == Rational(1)) || bare) {
        os << a;
        star = true;
      }
      auto factor = [&](const Monomial& m, const char* name) {
        for (std::size_t i = 0; i < dim_; ++i) {
          if (m[i] == 0) continue;
          if (star) os << "*";
          os << name << (i + 1);
          if (m[i] > 1) os << "^" << m[i];
          star = true;
        }
      };
      factor(t.x, "x");
      factor(t.d, "d");
    }
    return os.str();
  }
  friend std::ostream& operator<<(std::ostream& os, const WeylOp& op) { return os << op.str(); }

 private:
  std::size_t dim_ = 0;
  Terms terms_;
};

/// Composition A∘B in normal order. Uses
/// ∂^β x^γ = Σ_κ C(β,κ) γ!/(γ-κ)! x^{γ-κ} ∂^{β-κ}, componentwise.
inline WeylOp weyl_mul(const WeylOp& a, const WeylOp& b) {
  a.check(b);
  const std::size_t m = a.dim();
  WeylOp out(m);
  for (const auto& [ta, ca] : a.terms())
    for (const auto& [tb, cb] : b.terms()) {
      // Enumerate κ with κ_i <= min(β_i, γ_i).
      Monomial kappa(m);
      auto rec = [&](auto&& self, std::size_t i, BigInt w) -> void {
        if (i == m) {
          Monomial x = ta.x * tb.x.divided_by(kappa);
          Monomial d = ta.d.divided_by(kappa) * tb.d;
          out.add_term(x, d, ca * cb * Rational(w));
          return;
        }
        const int beta = ta.d[i], gamma = tb.x[i];
        for (int k = 0; k <= std::min(beta, gamma); ++k) {
          kappa.set(i, k);
          // C(β,k) γ!/(γ-k)!
          BigInt f = binomial(beta, k);
          for (int t = 0; t < k; ++t) f *= gamma - t;
          self(self, i + 1, w * f);
        }
        kappa.set(i, 0);
      };
      rec(rec, 0, BigInt(1));
    }
  return out;
}

inline WeylOp commutator(const WeylOp& a, const WeylOp& b) { return weyl_mul(a, b) - weyl_mul(b, a); }
inline WeylOp anticommutator(const WeylOp& a, const WeylOp& b) { return weyl_mul(a, b) + weyl_mul(b, a); }

/// Σ over ordered index tuples of [...[F^{a_1..a_j}, ∂_{a_1}]_+ ..., ∂_{a_j}]_+.
/// Each sorted index contributes once per distinct ordering.
inline WeylOp build_symmetry_operator(const SymTensorField& f) {
  const std::size_t m = f.dim();
  WeylOp out(m);
  for (const auto& [idx, p] : f.components()) {
    WeylOp op = WeylOp::coefficient(p);
    for (std::size_t i = 0; i < idx.size(); ++i)
      op = anticommutator(op, WeylOp::derivative(m, static_cast<std::size_t>(idx[i])));
    out += op * Rational(idx.arrangements());
  }
  return out;
}

/// g^{μν}∂_μ∂_ν - κ² with κ² a fixed rational.
struct KGFOperator {
  Signature signature{};
  Rational kappa_squared;

  WeylOp box() const {
    const std::size_t m = signature.dim();
    WeylOp op(m);
    for (std::size_t a = 0; a < m; ++a) {
      Monomial d(m);
      d.set(a, 2);
      op.add_term(Monomial(m), d, Rational(signature.metric(a)));
    }
    return op;
  }
  WeylOp op() const { return box() - WeylOp(signature.dim(), kappa_squared); }
};

inline KGFOperator kgf(Signature sig, const Rational& kappa_squared) { return {sig, kappa_squared}; }

struct PrincipalDivision {
  WeylOp alpha;
  WeylOp remainder;
};

/// Division of the normal symbol of C by the symbol of □ - κ², that is
/// Q(ξ) - κ² with Q(ξ) = Σ g^{μμ} ξ_μ², reducing powers of the last ξ
/// variable. The divisor has constant coefficients, so alpha∘(□ - κ²) is the
/// symbol product and C = alpha∘(□ - κ²) + remainder exactly.
inline PrincipalDivision divide_by_principal(const WeylOp& c, Signature sig,
                                             const Rational& kappa_squared = Rational(0)) {
  const std::size_t m = sig.dim();
  if (c.dim() != m) throw std::invalid_argument("divide_by_principal: dimension mismatch");
  const std::size_t last = m - 1;
  const Rational g_last(sig.metric(last));
  PrincipalDivision out{WeylOp(m), WeylOp(m)};
  WeylOp work = c;
  while (!work.is_zero()) {
    // Reduction only produces smaller terms, so the largest one is final.
    auto it = std::prev(work.terms().end());
    const OpTerm t = it->first;
    const Rational coef = it->second;
    if (t.d[last] < 2) {
      out.remainder.add_term(t.x, t.d, coef);
      work.add_term(t.x, t.d, -coef);
      continue;
    }
    Monomial q = t.d;
    q.set(last, t.d[last] - 2);
    const Rational qc = coef * g_last;
    out.alpha.add_term(t.x, q, qc);
    for (std::size_t a = 0; a < m; ++a) {
      Monomial d = q;
      d.set(a, q[a] + 2);
      work.add_term(t.x, d, -qc * Rational(sig.metric(a)));
    }
    work.add_term(t.x, q, qc * kappa_squared);
  }
  return out;
}

struct SymmetryReport {
  bool is_symmetry = false;
  WeylOp alpha;
  WeylOp remainder;
};

/// [Q, L] = [Q, □] since κ² is central; Q is a symmetry iff the commutator
/// lies in the left ideal generated by L, with alpha the quotient.
inline SymmetryReport check_symmetry(const WeylOp& q, const KGFOperator& l) {
  auto div = divide_by_principal(commutator(q, l.box()), l.signature, l.kappa_squared);
  return {div.remainder.is_zero(), std::move(div.alpha), std::move(div.remainder)};
}

namespace detail {

/// Coordinate vectors of operators over the union of their terms.
struct OpCoordinates {
  std::map<OpTerm, std::size_t, OpTermLess> index;
  void add(const WeylOp& op) {
    for (const auto& [t, _] : op.terms()) index.try_emplace(t, 0);
  }
  void finalize() {
    std::size_t i = 0;
    for (auto& [_, v] : index) v = i++;
  }
  RationalVector vec(const WeylOp& op) const {
    RationalVector v(index.size());
    for (const auto& [t, c] : op.terms()) v[index.at(t)] = c;
    return v;
  }
};

}  // namespace detail

/// Coefficients c with target = Σ c_i ops_i, or nothing when target is not in
/// the rational span. Free coefficients are set to zero.
inline std::optional<RationalVector> solve_in_span(const std::vector<WeylOp>& ops, const WeylOp& target) {
  detail::OpCoordinates coords;
  for (const auto& op : ops) coords.add(op);
  coords.add(target);
  coords.finalize();
  const std::size_t n = coords.index.size();
  // Columns are the operators; rows are term coordinates.
  std::vector<SparseMatrix::Row> rows(n);
  for (std::size_t i = 0; i < ops.size(); ++i)
    for (const auto& [t, c] : ops[i].terms()) rows[coords.index.at(t)].emplace_back(i, c);
  SparseMatrix a(0, ops.size());
  for (auto& r : rows) a.add_row(std::move(r));
  return particular_solution(a, coords.vec(target));
}

struct ClosureEntry {
  std::size_t i = 0;
  std::size_t k = 0;
  RationalVector coefficients;  // [G_i, G_k] = Σ c_l G_l
};

struct ClosureReport {
  bool closed = true;
  std::vector<ClosureEntry> structure_constants;
  std::vector<std::pair<std::size_t, std::size_t>> failures;
};

/// Commutator table of the generators, each entry solved in their span.
inline ClosureReport lie_closure_table(const std::vector<WeylOp>& gens) {
  ClosureReport r;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t k = i + 1; k < gens.size(); ++k) {
      auto c = solve_in_span(gens, commutator(gens[i], gens[k]));
      if (!c) {
        r.closed = false;
        r.failures.emplace_back(i, k);
        continue;
      }
      r.structure_constants.push_back({i, k, std::move(*c)});
    }
  return r;
}

inline bool lie_closure_check(const std::vector<WeylOp>& gens) { return lie_closure_table(gens).closed; }

/// First-order generators from a basis of Killing vectors.
inline std::vector<WeylOp> vector_operators(const Basis& vectors) {
  std::vector<WeylOp> ops;
  for (const auto& f : vectors.elements) ops.push_back(build_symmetry_operator(f));
  return ops;
}

struct CompletedOperator {
  WeylOp op;     // Q0 + R
  WeylOp alpha;  // [op, □] = alpha∘□
};

/// Adds lower-order terms R to Q0 so that [Q0 + R, □] lies in the left ideal
/// of □. R has derivative order < order(Q0) and coefficients of degree at
/// most the degree of Q0's coefficients; free parameters are set to zero, so
/// an operator that already commutes with □ is returned unchanged. Throws
/// std::domain_error if no such completion exists.
inline CompletedOperator complete_symmetry_operator(const WeylOp& q0, Signature sig) {
  const std::size_t m = sig.dim();
  if (q0.dim() != m) throw std::invalid_argument("complete_symmetry_operator: dimension mismatch");
  const WeylOp box = kgf(sig, Rational(0)).box();
  const int order = q0.order();
  int xdeg = 0;
  for (const auto& [t, _] : q0.terms()) xdeg = std::max(xdeg, t.x.degree());

  // Unknowns: R terms (order < order(Q0)), then alpha terms (order <= order(Q0) - 1).
  std::vector<WeylOp> cols;
  const auto xs = monomials_up_to(m, xdeg);
  for (int k = 0; k < std::max(order, 0); ++k)
    for (const auto& d : monomials_of_degree(m, k))
      for (const auto& x : xs) {
        WeylOp t(m);
        t.add_term(x, d, 1);
        cols.push_back(commutator(t, box));
      }
  const std::size_t n_r = cols.size();
  std::vector<OpTerm> unknown_terms;
  for (int k = 0; k < std::max(order, 0); ++k)
    for (const auto& d : monomials_of_degree(m, k))
      for (const auto& x : xs) {
        unknown_terms.push_back(OpTerm{x, d});
        WeylOp t(m);
        t.add_term(x, d, 1);
        cols.push_back(weyl_mul(t, box) * Rational(-1));
      }
  // Σ u_R [R,□] - Σ u_A A∘□ = -[Q0,□]
  auto sol = solve_in_span(cols, commutator(q0, box) * Rational(-1));
  if (!sol) throw std::domain_error("complete_symmetry_operator: no lower-order completion exists");
  CompletedOperator out{q0, WeylOp(m)};
  for (std::size_t i = 0; i < sol->size(); ++i) {
    const auto& u = (*sol)[i];
    if (u.is_zero()) continue;
    const OpTerm& t = unknown_terms[i % n_r];
    if (i < n_r) out.op.add_term(t.x, t.d, u);
    else out.alpha.add_term(t.x, t.d, u);
  }
  return out;
}

/// Symmetry operator for a conformal Killing tensor: the nested
/// anticommutator plus its lower-order completion.
inline CompletedOperator conformal_symmetry_operator(const SymTensorField& f) {
  return complete_symmetry_operator(build_symmetry_operator(f), f.signature());
}

/// True when `target` is a rational combination of 1, the generators, and
/// all ordered products of two generators.
inline bool in_enveloping_degree2(const std::vector<WeylOp>& gens, const WeylOp& target) {
  std::vector<WeylOp> span;
  span.emplace_back(target.dim(), Rational(1));
  for (const auto& g : gens) span.push_back(g);
  for (const auto& a : gens)
    for (const auto& b : gens) span.push_back(weyl_mul(a, b));
  return solve_in_span(span, target).has_value();
}

}  // namespace ktk
