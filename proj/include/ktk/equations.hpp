#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ktk/linalg.hpp"
#include "ktk/tensors.hpp"

namespace ktk {

/// ∂^a p = g^{aa} ∂p/∂x^a.
inline Poly raised_diff(const Poly& p, const Signature& sig, std::size_t a) {
  return poly_diff(p, a) * Rational(sig.metric(a));
}

/// Iterated raised derivative over the axes of `d`.
inline Poly raised_diff(Poly p, const Signature& sig, const SymMultiIndex& d) {
  for (std::size_t i = 0; i < d.size() && !p.is_zero(); ++i) p = raised_diff(p, sig, static_cast<std::size_t>(d[i]));
  return p;
}

/// Symmetrised s-fold derivative ∂^{(a_{j+1}}...∂^{a_{j+s}} F^{a_1...a_j)},
/// summed over the C(j+s, s) placements of the derivative indices. Zero iff F
/// is a Killing tensor of order s.
inline SymTensorField killing_residual(const SymTensorField& f, int s) {
  if (s < 1) throw std::invalid_argument("killing_residual: order s must be >= 1");
  const Signature& sig = f.signature();
  const auto derivs = enumerate_indices(s, sig.dim());
  SymTensorField out(f.rank() + s, sig);
  for (const auto& [idx, p] : f.components()) {
    for (const auto& d : derivs) {
      Poly dp = raised_diff(p, sig, d);
      if (dp.is_zero()) continue;
      SymMultiIndex full = idx.plus(d);
      BigInt w = 1;
      for (std::size_t i = 0; i < d.size();) {
        std::size_t k = i;
        while (k < d.size() && d[k] == d[i]) ++k;
        w *= binomial(full.multiplicity(d[i]), static_cast<long>(k - i));
        i = k;
      }
      out.add(full, dp * Rational(w));
    }
  }
  return out;
}

/// Traceless part of the Killing residual. The candidate must itself be
/// trace-free.
inline SymTensorField conformal_residual(const SymTensorField& f, int s) {
  if (!is_traceless(f)) throw std::invalid_argument("conformal_residual: candidate field is not traceless");
  return traceless_project(killing_residual(f, s));
}

/// Residual for the requested kind; conformal candidates are not re-checked
/// for tracelessness here.
inline SymTensorField defining_residual(Kind kind, const SymTensorField& f, int s) {
  return kind == Kind::ordinary ? killing_residual(f, s) : conformal_residual(f, s);
}

struct EqUnknownCount {
  BigInt equations;
  BigInt unknowns;
  friend bool operator==(const EqUnknownCount&, const EqUnknownCount&) = default;
};

/// Sizes of the k-th prolongation of the order-s system for rank j in m
/// dimensions.
inline EqUnknownCount count_eq_unknowns(int j, int k, int s, int m) {
  if (j < 0 || k < 0 || s < 0 || m < 0) throw std::invalid_argument("count_eq_unknowns: negative argument");
  return {binomial(j + s + m - 1, m - 1) * binomial(k + m - 1, m - 1),
          binomial(j + m - 1, m - 1) * binomial(k + s + m - 1, m - 1)};
}

/// Linear algebraic system on the derivative jet of order k+s of a rank-j
/// field. Row (A, B): the symmetrised equation index A (length j+s)
/// differentiated along B (length k). Column (base, deriv): the unknown
/// ∂^{deriv} F^{base} with |deriv| = k+s.
struct ProlongedSystem {
  int j = 0;
  int k = 0;
  int s = 1;
  Signature signature{};
  SparseMatrix matrix;
  std::vector<std::pair<SymMultiIndex, SymMultiIndex>> row_labels;
  std::vector<std::pair<SymMultiIndex, SymMultiIndex>> col_labels;  // (deriv, base)
};

inline ProlongedSystem prolong(int j, int k, int s, Signature sig) {
  if (j < 0 || k < 0 || s < 1) throw std::invalid_argument("prolong: need j >= 0, k >= 0, s >= 1");
  const std::size_t m = sig.dim();
  ProlongedSystem sys;
  sys.j = j;
  sys.k = k;
  sys.s = s;
  sys.signature = sig;
  const auto bases = enumerate_indices(j, m);
  const auto derivs = enumerate_indices(k + s, m);
  std::map<std::pair<SymMultiIndex, SymMultiIndex>, std::size_t> col_pos;
  for (const auto& d : derivs)
    for (const auto& b : bases) {
      col_pos[{d, b}] = sys.col_labels.size();
      sys.col_labels.emplace_back(d, b);
    }
  sys.matrix = SparseMatrix(0, sys.col_labels.size());
  for (const auto& a : enumerate_indices(j + s, m))
    for (const auto& b : enumerate_indices(k, m)) {
      SparseMatrix::Row row;
      for_each_submultiset(a, static_cast<std::size_t>(s), [&](const SymMultiIndex& sub, const BigInt& w) {
        row.emplace_back(col_pos.at({b.plus(sub), a.minus(sub)}), Rational(w));
      });
      sys.matrix.add_row(std::move(row));
      sys.row_labels.emplace_back(a, b);
    }
  return sys;
}

/// The order-(k+s) derivative jet of F at the origin, laid out on the columns
/// of prolong(j, k, s): entry (deriv, base) is ∂^{deriv} F^{base}(0).
inline RationalVector derivative_jet(const SymTensorField& f, const ProlongedSystem& sys) {
  RationalVector v(sys.col_labels.size());
  const Monomial origin(f.dim());
  for (std::size_t c = 0; c < v.size(); ++c) {
    const auto& [d, b] = sys.col_labels[c];
    v[c] = raised_diff(f.at(b), f.signature(), d).coeff(origin);
  }
  return v;
}

}  // namespace ktk
