#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ktk/linalg.hpp"
#include "ktk/poly.hpp"
#include "ktk/rational.hpp"

namespace ktk {

/// Diagonal metric with p entries +1 followed by q entries -1.
struct Signature {
  int p = 0;
  int q = 0;

  Signature() = default;
  Signature(int p_, int q_) : p(p_), q(q_) {
    if (p < 0 || q < 0 || p + q < 1) throw std::invalid_argument("Signature: need p, q >= 0 and p+q >= 1");
    if (static_cast<std::size_t>(p + q) > kMaxDim) throw std::invalid_argument("Signature: dimension exceeds kMaxDim");
  }
  static Signature euclidean(int m) { return {m, 0}; }

  std::size_t dim() const { return static_cast<std::size_t>(p + q); }
  /// g^{aa} = g_{aa} for axis a (0-based).
  int metric(std::size_t a) const { return static_cast<int>(a) < p ? 1 : -1; }

  friend bool operator==(const Signature&, const Signature&) = default;
  std::string str() const { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }
};

/// Sorted multi-index (a_1 <= ... <= a_j) of a symmetric tensor component.
/// Values are 0-based axes internally; text and JSON forms are 1-based.
class SymMultiIndex {
 public:
  SymMultiIndex() = default;
  explicit SymMultiIndex(std::vector<std::uint8_t> idx) : idx_(std::move(idx)) {
    std::sort(idx_.begin(), idx_.end());
  }
  SymMultiIndex(std::initializer_list<int> idx) {
    for (int v : idx) idx_.push_back(static_cast<std::uint8_t>(v));
    std::sort(idx_.begin(), idx_.end());
  }
  static SymMultiIndex from_ints(const std::vector<int>& v) {
    std::vector<std::uint8_t> idx;
    for (int a : v) {
      if (a < 0 || a >= static_cast<int>(kMaxDim)) throw std::out_of_range("SymMultiIndex: axis out of range");
      idx.push_back(static_cast<std::uint8_t>(a));
    }
    return SymMultiIndex(std::move(idx));
  }

  std::size_t size() const { return idx_.size(); }
  int operator[](std::size_t i) const { return idx_[i]; }
  const std::vector<std::uint8_t>& values() const { return idx_; }

  int multiplicity(int a) const {
    return static_cast<int>(std::count(idx_.begin(), idx_.end(), static_cast<std::uint8_t>(a)));
  }

  SymMultiIndex plus(const SymMultiIndex& o) const {
    std::vector<std::uint8_t> r;
    r.reserve(size() + o.size());
    std::merge(idx_.begin(), idx_.end(), o.idx_.begin(), o.idx_.end(), std::back_inserter(r));
    SymMultiIndex out;
    out.idx_ = std::move(r);
    return out;
  }
  SymMultiIndex plus(int a) const { return plus(SymMultiIndex{a}); }
  /// Multiset difference; `o` must be contained in *this.
  SymMultiIndex minus(const SymMultiIndex& o) const {
    std::vector<std::uint8_t> r;
    std::set_difference(idx_.begin(), idx_.end(), o.idx_.begin(), o.idx_.end(), std::back_inserter(r));
    if (r.size() + o.size() != size()) throw std::invalid_argument("SymMultiIndex: not a sub-multiset");
    SymMultiIndex out;
    out.idx_ = std::move(r);
    return out;
  }

  /// Number of distinct orderings of this multiset.
  BigInt arrangements() const {
    BigInt r = factorial(static_cast<long>(size()));
    std::size_t i = 0;
    while (i < size()) {
      std::size_t k = i;
      while (k < size() && idx_[k] == idx_[i]) ++k;
      r /= factorial(static_cast<long>(k - i));
      i = k;
    }
    return r;
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < size(); ++i) s += (i ? "," : "") + std::to_string(idx_[i] + 1);
    return s + ")";
  }

  friend auto operator<=>(const SymMultiIndex&, const SymMultiIndex&) = default;
  friend bool operator==(const SymMultiIndex&, const SymMultiIndex&) = default;

 private:
  std::vector<std::uint8_t> idx_;
};

/// All sorted multi-indices of length j over m axes, lexicographic order.
/// There are C(j+m-1, m-1) of them.
inline std::vector<SymMultiIndex> enumerate_indices(int j, std::size_t m) {
  if (j < 0 || m < 1) throw std::invalid_argument("enumerate_indices: need j >= 0, m >= 1");
  std::vector<SymMultiIndex> out;
  std::vector<std::uint8_t> cur(static_cast<std::size_t>(j));
  auto rec = [&](auto&& self, std::size_t pos, std::uint8_t lo) -> void {
    if (pos == cur.size()) {
      out.emplace_back(cur);
      return;
    }
    for (std::uint8_t a = lo; a < m; ++a) {
      cur[pos] = a;
      self(self, pos + 1, a);
    }
  };
  rec(rec, 0, 0);
  return out;
}

/// Calls fn(sub, weight) for every sub-multiset `sub` of `idx` of size k,
/// where weight = prod_v C(mult_idx(v), mult_sub(v)) counts the position
/// subsets of `idx` that realise `sub`.
template <class Fn>
void for_each_submultiset(const SymMultiIndex& idx, std::size_t k, Fn&& fn) {
  std::vector<std::pair<std::uint8_t, int>> groups;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (!groups.empty() && groups.back().first == idx[i]) ++groups.back().second;
    else groups.emplace_back(static_cast<std::uint8_t>(idx[i]), 1);
  }
  std::vector<std::uint8_t> chosen;
  auto rec = [&](auto&& self, std::size_t g, std::size_t left, BigInt weight) -> void {
    if (g == groups.size()) {
      if (left == 0) fn(SymMultiIndex(chosen), weight);
      return;
    }
    auto [val, mult] = groups[g];
    for (int take = 0; take <= mult && static_cast<std::size_t>(take) <= left; ++take) {
      for (int t = 0; t < take; ++t) chosen.push_back(val);
      self(self, g + 1, left - static_cast<std::size_t>(take), weight * binomial(mult, take));
      for (int t = 0; t < take; ++t) chosen.pop_back();
    }
  };
  rec(rec, 0, k, BigInt(1));
}

/// Symmetric rank-j tensor field with polynomial components. Only nonzero
/// components are stored.
class SymTensorField {
 public:
  using Components = std::map<SymMultiIndex, Poly>;

  SymTensorField() = default;
  SymTensorField(int rank, Signature sig) : rank_(rank), sig_(sig) {
    if (rank < 0) throw std::invalid_argument("SymTensorField: negative rank");
  }

  /// Rank-0 field holding a single polynomial.
  static SymTensorField scalar(Signature sig, const Poly& p) {
    SymTensorField f(0, sig);
    f.set(SymMultiIndex{}, p);
    return f;
  }

  int rank() const { return rank_; }
  const Signature& signature() const { return sig_; }
  std::size_t dim() const { return sig_.dim(); }
  const Components& components() const { return comps_; }

  Poly at(const SymMultiIndex& idx) const {
    auto it = comps_.find(idx);
    return it == comps_.end() ? Poly(dim()) : it->second;
  }
  void set(const SymMultiIndex& idx, Poly p) {
    check_index(idx);
    if (p.dim() != dim()) throw std::invalid_argument("SymTensorField: component dimension mismatch");
    if (p.is_zero()) comps_.erase(idx);
    else comps_[idx] = std::move(p);
  }
  void add(const SymMultiIndex& idx, const Poly& p) {
    check_index(idx);
    if (p.is_zero()) return;
    auto it = comps_.find(idx);
    if (it == comps_.end()) {
      comps_.emplace(idx, p);
      return;
    }
    it->second += p;
    if (it->second.is_zero()) comps_.erase(it);
  }

  bool is_zero() const { return comps_.empty(); }

  /// Highest polynomial degree over all components; -1 when zero.
  int degree() const {
    int d = -1;
    for (const auto& [_, p] : comps_) d = std::max(d, p.degree());
    return d;
  }

  SymTensorField& operator+=(const SymTensorField& o) {
    check_compatible(o);
    for (const auto& [i, p] : o.comps_) add(i, p);
    return *this;
  }
  SymTensorField& operator-=(const SymTensorField& o) {
    check_compatible(o);
    for (const auto& [i, p] : o.comps_) add(i, -p);
    return *this;
  }
  SymTensorField& operator*=(const Rational& s) {
    if (s.is_zero()) comps_.clear();
    for (auto& [_, p] : comps_) p *= s;
    return *this;
  }
  friend SymTensorField operator+(SymTensorField a, const SymTensorField& b) { return a += b; }
  friend SymTensorField operator-(SymTensorField a, const SymTensorField& b) { return a -= b; }
  friend SymTensorField operator*(SymTensorField a, const Rational& s) { return a *= s; }
  friend SymTensorField operator*(const Rational& s, SymTensorField a) { return a *= s; }

  /// Multiplies every component by a polynomial.
  friend SymTensorField operator*(const Poly& phi, const SymTensorField& f) {
    SymTensorField r(f.rank_, f.sig_);
    for (const auto& [i, p] : f.comps_) r.set(i, phi * p);
    return r;
  }

  friend bool operator==(const SymTensorField& a, const SymTensorField& b) {
    return a.rank_ == b.rank_ && a.sig_ == b.sig_ && a.comps_ == b.comps_;
  }

  std::string str() const {
    if (comps_.empty()) return "0";
    std::string s;
    for (const auto& [i, p] : comps_) s += (s.empty() ? "" : "; ") + i.str() + ": " + p.str();
    return s;
  }

 private:
  void check_index(const SymMultiIndex& idx) const {
    if (static_cast<int>(idx.size()) != rank_) throw std::invalid_argument("SymTensorField: index length != rank");
    for (std::size_t i = 0; i < idx.size(); ++i)
      if (static_cast<std::size_t>(idx[i]) >= dim()) throw std::out_of_range("SymTensorField: axis out of range");
  }
  void check_compatible(const SymTensorField& o) const {
    if (o.rank_ != rank_ || !(o.sig_ == sig_)) throw std::invalid_argument("SymTensorField: rank/signature mismatch");
  }

  int rank_ = 0;
  Signature sig_{};
  Components comps_;
};

/// Collapses an arbitrary (non-symmetric) tensor given by ordered index
/// tuples onto sorted multi-indices: component I is the sum of the input over
/// the distinct orderings of I. Absent tuples are zero, and a field stored
/// with sorted keys only is returned unchanged.
inline SymTensorField symmetrize(const std::map<std::vector<int>, Poly>& components, int j, Signature sig) {
  SymTensorField out(j, sig);
  for (const auto& [tuple, p] : components) {
    if (static_cast<int>(tuple.size()) != j) throw std::invalid_argument("symmetrize: tuple length != rank");
    out.add(SymMultiIndex::from_ints(tuple), p);
  }
  return out;
}

/// Symmetric product A^{(a_1..a_r} B^{a_{r+1}..a_{r+t})} as the sum over the
/// distinct placements of A's indices among the r+t slots.
inline SymTensorField sym_product(const SymTensorField& a, const SymTensorField& b) {
  if (!(a.signature() == b.signature())) throw std::invalid_argument("sym_product: signature mismatch");
  const int rank = a.rank() + b.rank();
  SymTensorField out(rank, a.signature());
  for (const auto& [ia, pa] : a.components())
    for (const auto& [ib, pb] : b.components()) {
      SymMultiIndex idx = ia.plus(ib);
      // Weight = number of position subsets of idx that realise ia.
      BigInt w = 1;
      for (std::size_t i = 0; i < ia.size();) {
        std::size_t k = i;
        while (k < ia.size() && ia[k] == ia[i]) ++k;
        w *= binomial(idx.multiplicity(ia[i]), static_cast<long>(k - i));
        i = k;
      }
      out.add(idx, (pa * pb) * Rational(w));
    }
  return out;
}

/// The metric g^{ab} as a constant rank-2 field.
inline SymTensorField metric_tensor(Signature sig) {
  SymTensorField g(2, sig);
  for (std::size_t a = 0; a < sig.dim(); ++a)
    g.set(SymMultiIndex{static_cast<int>(a), static_cast<int>(a)}, Poly(sig.dim(), Rational(sig.metric(a))));
  return g;
}

/// Contraction of two index slots with g_{ab}. For a symmetric field every
/// pair of slots gives the same result; `pair` is validated only.
inline SymTensorField trace(const SymTensorField& f, std::pair<int, int> pair = {0, 1}) {
  if (f.rank() < 2) throw std::invalid_argument("trace: rank < 2");
  if (pair.first == pair.second || pair.first < 0 || pair.second < 0 || pair.first >= f.rank() ||
      pair.second >= f.rank())
    throw std::invalid_argument("trace: invalid index pair");
  const Signature& sig = f.signature();
  SymTensorField out(f.rank() - 2, sig);
  for (const auto& [idx, p] : f.components()) {
    // idx = J + {a,a}; every axis appearing at least twice contributes once.
    for (std::size_t a = 0; a < sig.dim(); ++a) {
      int ai = static_cast<int>(a);
      if (idx.multiplicity(ai) < 2) continue;
      out.add(idx.minus(SymMultiIndex{ai, ai}), p * Rational(sig.metric(a)));
    }
  }
  return out;
}

/// Traceless projection for a fixed (rank, signature). The projection of F
/// is F - sym(g (x) T) where T is the unique rank-2 lower tensor making the
/// result trace-free; T is obtained from a small exact linear solve that is
/// set up once per projector.
class TracelessProjector {
 public:
  TracelessProjector(int rank, Signature sig) : rank_(rank), sig_(sig) {
    if (rank < 2) return;
    lower_ = enumerate_indices(rank - 2, sig.dim());
    const std::size_t n = lower_.size();
    std::map<SymMultiIndex, std::size_t> pos;
    for (std::size_t i = 0; i < n; ++i) pos[lower_[i]] = i;
    RationalMatrix m(n, n);
    const SymTensorField g = metric_tensor(sig);
    for (std::size_t c = 0; c < n; ++c) {
      SymTensorField unit(rank - 2, sig);
      unit.set(lower_[c], Poly(sig.dim(), Rational(1)));
      SymTensorField tr = trace(sym_product(g, unit));
      for (const auto& [idx, p] : tr.components()) m(pos.at(idx), c) = p.coeff(Monomial(sig.dim()));
    }
    inverse_ = m.inverse();
  }

  int rank() const { return rank_; }

  SymTensorField operator()(const SymTensorField& f) const {
    if (f.rank() != rank_ || !(f.signature() == sig_))
      throw std::invalid_argument("TracelessProjector: rank/signature mismatch");
    if (rank_ < 2) return f;
    SymTensorField tr = trace(f);
    SymTensorField t(rank_ - 2, sig_);
    const std::size_t n = lower_.size();
    for (std::size_t r = 0; r < n; ++r) {
      Poly acc(sig_.dim());
      for (std::size_t c = 0; c < n; ++c) {
        const Rational& w = inverse_(r, c);
        if (w.is_zero()) continue;
        auto it = tr.components().find(lower_[c]);
        if (it != tr.components().end()) acc += it->second * w;
      }
      t.set(lower_[r], std::move(acc));
    }
    return f - sym_product(metric_tensor(sig_), t);
  }

 private:
  int rank_;
  Signature sig_;
  std::vector<SymMultiIndex> lower_;
  RationalMatrix inverse_;
};

inline SymTensorField traceless_project(const SymTensorField& f) {
  return TracelessProjector(f.rank(), f.signature())(f);
}

inline bool is_traceless(const SymTensorField& f) { return f.rank() < 2 || trace(f).is_zero(); }

/// The covariant coordinate x_b = g_{bb} x^b as a polynomial.
inline Poly lowered_coordinate(Signature sig, std::size_t b) {
  return Poly::variable(sig.dim(), b) * Rational(sig.metric(b));
}

/// x^2 = g_{ab} x^a x^b.
inline Poly x_squared(Signature sig) {
  Poly r(sig.dim());
  for (std::size_t a = 0; a < sig.dim(); ++a) r += Poly::variable(sig.dim(), a) * lowered_coordinate(sig, a);
  return r;
}

/// Contraction of one index with the covariant coordinate: result^{J} =
/// sum_b F^{J b} x_b.
inline SymTensorField contract_x(const SymTensorField& f) {
  if (f.rank() < 1) throw std::invalid_argument("contract_x: rank 0 field");
  const Signature& sig = f.signature();
  SymTensorField out(f.rank() - 1, sig);
  for (const auto& [idx, p] : f.components()) {
    for (std::size_t b = 0; b < sig.dim(); ++b) {
      int bi = static_cast<int>(b);
      if (idx.multiplicity(bi) == 0) continue;
      out.add(idx.minus(SymMultiIndex{bi}), p * lowered_coordinate(sig, b));
    }
  }
  return out;
}

enum class Kind { ordinary, conformal };

inline std::string to_string(Kind k) { return k == Kind::ordinary ? "ordinary" : "conformal"; }
inline Kind kind_from_string(const std::string& s) {
  if (s == "ordinary") return Kind::ordinary;
  if (s == "conformal") return Kind::conformal;
  throw std::invalid_argument("unknown kind '" + s + "'");
}

/// Ordered list of independent (conformal) Killing tensors sharing rank,
/// order and signature.
struct Basis {
  Kind kind = Kind::ordinary;
  int j = 0;
  int s = 1;
  Signature signature{};
  int degree_bound = 0;
  std::vector<SymTensorField> elements;

  std::size_t size() const { return elements.size(); }
};

/// Coordinate vector of a field over (monomial, component) pairs; used for
/// exact span comparisons between bases.
class FieldCoordinates {
 public:
  FieldCoordinates(int rank, Signature sig, int max_degree)
      : comps_(enumerate_indices(rank, sig.dim())), monos_(monomials_up_to(sig.dim(), max_degree)) {
    for (std::size_t i = 0; i < comps_.size(); ++i) comp_pos_[comps_[i]] = i;
    for (std::size_t i = 0; i < monos_.size(); ++i) mono_pos_[monos_[i]] = i;
  }

  std::size_t size() const { return comps_.size() * monos_.size(); }
  const std::vector<SymMultiIndex>& components() const { return comps_; }
  const std::vector<Monomial>& monomials() const { return monos_; }

  /// Column for (monomial, component): monomial-major so that each
  /// homogeneous degree occupies a contiguous block.
  std::size_t column(std::size_t mono, std::size_t comp) const { return mono * comps_.size() + comp; }

  RationalVector coordinates(const SymTensorField& f) const {
    RationalVector v(size());
    for (const auto& [idx, p] : f.components())
      for (const auto& [m, c] : p.terms()) {
        auto mi = mono_pos_.find(m);
        if (mi == mono_pos_.end()) throw std::invalid_argument("FieldCoordinates: degree exceeds bound");
        v[column(mi->second, comp_pos_.at(idx))] = c;
      }
    return v;
  }

  SymTensorField field(const RationalVector& v, int rank, Signature sig) const {
    SymTensorField f(rank, sig);
    for (std::size_t col = 0; col < v.size(); ++col) {
      if (v[col].is_zero()) continue;
      f.add(comps_[col % comps_.size()], Poly(monos_[col / comps_.size()], v[col]));
    }
    return f;
  }

 private:
  std::vector<SymMultiIndex> comps_;
  std::vector<Monomial> monos_;
  std::map<SymMultiIndex, std::size_t> comp_pos_;
  std::map<Monomial, std::size_t, GradedLex> mono_pos_;
};

}  // namespace ktk
