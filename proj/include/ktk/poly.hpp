#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ktk/rational.hpp"

namespace ktk {

inline constexpr std::size_t kMaxDim = 8;

/// Exponent vector of x_1..x_m stored densely inline.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t dim) : dim_(check_dim(dim)) {}
  Monomial(std::size_t dim, std::initializer_list<int> exps) : dim_(check_dim(dim)) {
    if (exps.size() != dim) throw std::invalid_argument("Monomial: exponent count != dimension");
    std::size_t i = 0;
    for (int e : exps) set(i++, e);
  }
  explicit Monomial(const std::vector<int>& exps) : dim_(check_dim(exps.size())) {
    for (std::size_t i = 0; i < exps.size(); ++i) set(i, exps[i]);
  }

  static Monomial variable(std::size_t dim, std::size_t axis) {
    Monomial m(dim);
    m.set(axis, 1);
    return m;
  }

  std::size_t dim() const { return dim_; }
  int operator[](std::size_t i) const { return exps_[i]; }
  void set(std::size_t i, int e) {
    if (i >= dim_) throw std::out_of_range("Monomial: axis out of range");
    if (e < 0) throw std::invalid_argument("Monomial: negative exponent");
    exps_[i] = static_cast<std::uint16_t>(e);
  }
  int degree() const {
    int d = 0;
    for (std::size_t i = 0; i < dim_; ++i) d += exps_[i];
    return d;
  }
  std::vector<int> exponents() const { return {exps_.begin(), exps_.begin() + dim_}; }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("Monomial: dimension mismatch");
    Monomial r(a.dim_);
    for (std::size_t i = 0; i < a.dim_; ++i) r.exps_[i] = a.exps_[i] + b.exps_[i];
    return r;
  }

  /// True when every exponent of `b` is <= the matching exponent of `*this`.
  bool divisible_by(const Monomial& b) const {
    for (std::size_t i = 0; i < dim_; ++i)
      if (exps_[i] < b.exps_[i]) return false;
    return true;
  }
  Monomial divided_by(const Monomial& b) const {
    Monomial r(dim_);
    for (std::size_t i = 0; i < dim_; ++i) r.exps_[i] = exps_[i] - b.exps_[i];
    return r;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.dim_ == b.dim_ && a.exps_ == b.exps_;
  }

 private:
  static std::size_t check_dim(std::size_t dim) {
    if (dim > kMaxDim) throw std::invalid_argument("Monomial: dimension exceeds kMaxDim");
    return dim;
  }
  std::size_t dim_ = 0;
  std::array<std::uint16_t, kMaxDim> exps_{};
};

/// Graded order: total degree first, then x_1 before x_2 before ... within a
/// degree (1, x1, x2, x1^2, x1x2, x2^2, ...).
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    for (std::size_t i = 0; i < a.dim(); ++i)
      if (a[i] != b[i]) return a[i] > b[i];
    return false;
  }
};

/// All monomials in `dim` variables of total degree exactly `degree`, in
/// GradedLex order.
inline std::vector<Monomial> monomials_of_degree(std::size_t dim, int degree) {
  std::vector<Monomial> out;
  if (dim == 0) {
    if (degree == 0) out.emplace_back(0);
    return out;
  }
  std::vector<int> e(dim, 0);
  // Lex-descending enumeration of compositions of `degree` into `dim` parts.
  auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos + 1 == dim) {
      e[pos] = left;
      out.emplace_back(e);
      return;
    }
    for (int v = left; v >= 0; --v) {
      e[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, degree);
  return out;
}

inline std::vector<Monomial> monomials_up_to(std::size_t dim, int max_degree) {
  std::vector<Monomial> out;
  for (int d = 0; d <= max_degree; ++d) {
    auto block = monomials_of_degree(dim, d);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

/// Sparse multivariate polynomial with exact rational coefficients.
class Poly {
 public:
  using Terms = std::map<Monomial, Rational, GradedLex>;

  Poly() = default;
  explicit Poly(std::size_t dim) : dim_(dim) {}
  Poly(std::size_t dim, const Rational& c) : dim_(dim) {
    if (!c.is_zero()) terms_.emplace(Monomial(dim), c);
  }
  Poly(const Monomial& m, const Rational& c) : dim_(m.dim()) {
    if (!c.is_zero()) terms_.emplace(m, c);
  }

  static Poly variable(std::size_t dim, std::size_t axis) {
    return Poly(Monomial::variable(dim, axis), 1);
  }

  std::size_t dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Highest total degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

  Rational coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational() : it->second;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (m.dim() != dim_) throw std::invalid_argument("Poly: dimension mismatch");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Poly& operator+=(const Poly& o) {
    check(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Poly& operator*=(const Rational& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return a *= Rational(-1); }
  friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
  friend Poly operator*(const Rational& s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check(b);
    Poly r(a.dim_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << (c.sign() < 0 ? " - " : " + ");
      else if (c.sign() < 0) os << "-";
      first = false;
      Rational a = c.sign() < 0 ? -c : c;
      bool unit = a == Rational(1);
      if (!unit || m.degree() == 0) os << a;
      bool star = !unit || m.degree() == 0;
      for (std::size_t i = 0; i < dim_; ++i) {
        if (m[i] == 0) continue;
        if (star) os << "*";
        os << "x" << (i + 1);
        if (m[i] > 1) os << "^" << m[i];
        star = true;
      }
    }
    return os.str();
  }
  friend std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.str(); }

 private:
  void check(const Poly& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("Poly: dimension mismatch");
  }
  std::size_t dim_ = 0;
  Terms terms_;
};

inline Poly poly_add(const Poly& a, const Poly& b) { return a + b; }
inline Poly poly_mul(const Poly& a, const Poly& b) { return a * b; }

/// Formal partial derivative with respect to x_{axis+1} (axis is 0-based).
inline Poly poly_diff(const Poly& p, std::size_t axis) {
  if (axis >= p.dim()) throw std::out_of_range("poly_diff: axis out of range");
  Poly r(p.dim());
  for (const auto& [m, c] : p.terms()) {
    int e = m[axis];
    if (e == 0) continue;
    Monomial d = m;
    d.set(axis, e - 1);
    r.add_term(d, c * Rational(e));
  }
  return r;
}

}  // namespace ktk
