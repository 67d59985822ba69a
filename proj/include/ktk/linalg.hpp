#pragma once

// Exact linear algebra over the rationals: a dense matrix type with
// Gauss-Jordan inverse and a dense Bareiss rank (used for small systems and
// as an independent route in tests), plus the sparse fraction-free
// elimination used for the large ansatz and prolongation systems.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ktk/rational.hpp"

namespace ktk {

using RationalVector = std::vector<Rational>;

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  RationalMatrix(std::initializer_list<std::initializer_list<long>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw std::invalid_argument("RationalMatrix: ragged initializer");
      for (long v : row) data_.emplace_back(v);
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  static RationalMatrix identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  RationalVector apply(const RationalVector& v) const {
    if (v.size() != cols_) throw std::invalid_argument("RationalMatrix: vector size mismatch");
    RationalVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        if (!(*this)(r, c).is_zero() && !v[c].is_zero()) out[r] += (*this)(r, c) * v[c];
    return out;
  }

  /// Gauss-Jordan inverse; throws std::domain_error when singular.
  RationalMatrix inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("RationalMatrix: inverse of non-square matrix");
    const std::size_t n = rows_;
    RationalMatrix a = *this;
    RationalMatrix inv = identity(n);
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      while (piv < n && a(piv, col).is_zero()) ++piv;
      if (piv == n) throw std::domain_error("RationalMatrix: singular matrix");
      if (piv != col) {
        for (std::size_t c = 0; c < n; ++c) {
          std::swap(a(piv, c), a(col, c));
          std::swap(inv(piv, c), inv(col, c));
        }
      }
      Rational p = a(col, col);
      for (std::size_t c = 0; c < n; ++c) {
        a(col, c) /= p;
        inv(col, c) /= p;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col || a(r, col).is_zero()) continue;
        Rational f = a(r, col);
        for (std::size_t c = 0; c < n; ++c) {
          if (!a(col, c).is_zero()) a(r, c) -= f * a(col, c);
          if (!inv(col, c).is_zero()) inv(r, c) -= f * inv(col, c);
        }
      }
    }
    return inv;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/// Dense Bareiss elimination; returns the exact rank. Rows are scaled to
/// integers first so every intermediate stays in Z.
inline std::size_t bareiss_rank(const RationalMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::vector<BigInt>> a(rows, std::vector<BigInt>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    BigInt l = 1;
    for (std::size_t c = 0; c < cols; ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).den().get_mpz_t());
    for (std::size_t c = 0; c < cols; ++c) a[r][c] = m(r, c).num() * (l / m(r, c).den());
  }
  BigInt prev = 1;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t piv = rank;
    while (piv < rows && a[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      for (std::size_t c = col + 1; c < cols; ++c) {
        a[r][c] = (a[rank][col] * a[r][c] - a[r][col] * a[rank][c]);
        mpz_divexact(a[r][c].get_mpz_t(), a[r][c].get_mpz_t(), prev.get_mpz_t());
      }
      a[r][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return rank;
}

/// Sparse matrix with exact rational entries, stored by rows.
class SparseMatrix {
 public:
  using Entry = std::pair<std::size_t, Rational>;
  using Row = std::vector<Entry>;  // sorted by column, no zeros

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows) {}

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  const Row& row(std::size_t r) const { return rows_[r]; }

  /// Appends a row given as (column, value) pairs in any order; duplicate
  /// columns are summed.
  std::size_t add_row(Row entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    Row merged;
    for (auto& e : entries) {
      if (e.first >= cols_) throw std::out_of_range("SparseMatrix: column out of range");
      if (!merged.empty() && merged.back().first == e.first) merged.back().second += e.second;
      else merged.push_back(std::move(e));
    }
    std::erase_if(merged, [](const Entry& e) { return e.second.is_zero(); });
    rows_.push_back(std::move(merged));
    return rows_.size() - 1;
  }

  void set_row(std::size_t r, Row entries) {
    Row tmp = std::move(entries);
    add_row(std::move(tmp));
    rows_[r] = std::move(rows_.back());
    rows_.pop_back();
  }

  RationalMatrix to_dense() const {
    RationalMatrix d(rows(), cols_);
    for (std::size_t r = 0; r < rows(); ++r)
      for (const auto& [c, v] : rows_[r]) d(r, c) = v;
    return d;
  }

  static SparseMatrix from_dense(const RationalMatrix& d) {
    SparseMatrix s(0, d.cols());
    for (std::size_t r = 0; r < d.rows(); ++r) {
      Row row;
      for (std::size_t c = 0; c < d.cols(); ++c)
        if (!d(r, c).is_zero()) row.emplace_back(c, d(r, c));
      s.add_row(std::move(row));
    }
    return s;
  }

  RationalVector apply(const RationalVector& v) const {
    if (v.size() != cols_) throw std::invalid_argument("SparseMatrix: vector size mismatch");
    RationalVector out(rows());
    for (std::size_t r = 0; r < rows(); ++r)
      for (const auto& [c, val] : rows_[r])
        if (!v[c].is_zero()) out[r] += val * v[c];
    return out;
  }

 private:
  std::size_t cols_ = 0;
  std::vector<Row> rows_;
};

namespace detail {

using IntRow = std::vector<std::pair<std::size_t, BigInt>>;

inline IntRow to_primitive_int_row(const SparseMatrix::Row& row) {
  BigInt l = 1;
  for (const auto& e : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.second.den().get_mpz_t());
  IntRow out;
  out.reserve(row.size());
  BigInt g = 0;
  for (const auto& [c, v] : row) {
    out.emplace_back(c, v.num() * (l / v.den()));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out.back().second.get_mpz_t());
  }
  if (g > 1)
    for (auto& e : out) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), g.get_mpz_t());
  return out;
}

/// target <- (a/g)*target - (b/g)*pivot, where a, b are the entries of pivot
/// and target in the eliminated column; the result is made primitive.
inline IntRow eliminate(const IntRow& target, const IntRow& pivot, std::size_t col) {
  const BigInt& a = pivot.back().second;  // pivot's leading (highest) column
  BigInt b = target.back().second;
  BigInt g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  BigInt fa = a / g, fb = b / g;
  IntRow out;
  out.reserve(target.size() + pivot.size());
  std::size_t i = 0, k = 0;
  while (i < target.size() || k < pivot.size()) {
    std::size_t ci = i < target.size() ? target[i].first : SIZE_MAX;
    std::size_t ck = k < pivot.size() ? pivot[k].first : SIZE_MAX;
    BigInt v;
    std::size_t c;
    if (ci == ck) {
      c = ci;
      v = fa * target[i++].second - fb * pivot[k++].second;
    } else if (ci < ck) {
      c = ci;
      v = fa * target[i++].second;
    } else {
      c = ck;
      v = -fb * pivot[k++].second;
    }
    if (c == col || v == 0) continue;
    out.emplace_back(c, std::move(v));
  }
  BigInt content = 0;
  for (const auto& e : out) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), e.second.get_mpz_t());
  if (content > 1)
    for (auto& e : out)
      mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), content.get_mpz_t());
  return out;
}

/// Echelon form with columns consumed from last to first. Each pivot row's
/// highest column is its pivot; all other entries sit in lower columns.
struct ReverseEchelon {
  std::size_t cols = 0;
  std::vector<IntRow> pivot_rows;             // indexed by pivot order
  std::vector<std::optional<std::size_t>> pivot_of_col;  // col -> pivot_rows index
  std::size_t rank() const { return pivot_rows.size(); }
};

inline ReverseEchelon reverse_echelon(const SparseMatrix& m) {
  ReverseEchelon out;
  out.cols = m.cols();
  out.pivot_of_col.assign(m.cols(), std::nullopt);
  std::vector<IntRow> rows;
  rows.reserve(m.rows());
  std::vector<std::vector<std::size_t>> bucket(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (m.row(r).empty()) continue;
    rows.push_back(to_primitive_int_row(m.row(r)));
    bucket[rows.back().back().first].push_back(rows.size() - 1);
  }
  for (std::size_t col = m.cols(); col-- > 0;) {
    auto& cand = bucket[col];
    if (cand.empty()) continue;
    // Pivot: shortest row, then smallest leading magnitude, then lowest id.
    std::size_t best = 0;
    for (std::size_t i = 1; i < cand.size(); ++i) {
      const IntRow& x = rows[cand[i]];
      const IntRow& y = rows[cand[best]];
      if (x.size() != y.size()) {
        if (x.size() < y.size()) best = i;
        continue;
      }
      int c = mpz_cmpabs(x.back().second.get_mpz_t(), y.back().second.get_mpz_t());
      if (c < 0 || (c == 0 && cand[i] < cand[best])) best = i;
    }
    std::size_t prow = cand[best];
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (i == best) continue;
      IntRow reduced = eliminate(rows[cand[i]], rows[prow], col);
      rows[cand[i]].clear();
      if (!reduced.empty()) {
        std::size_t lead = reduced.back().first;
        rows[cand[i]] = std::move(reduced);
        bucket[lead].push_back(cand[i]);
      }
    }
    out.pivot_of_col[col] = out.pivot_rows.size();
    out.pivot_rows.push_back(std::move(rows[prow]));
    cand.clear();
    cand.shrink_to_fit();
  }
  return out;
}

}  // namespace detail

inline std::size_t rank(const SparseMatrix& m) { return detail::reverse_echelon(m).rank(); }

namespace detail {

/// Kernel vector for free column f: x_f = 1, every other free column 0.
/// Pivot columns above f depend only on lower columns, so they are solved
/// bottom-up.
inline RationalVector kernel_vector(const ReverseEchelon& ech, const std::vector<std::size_t>& pivot_cols,
                                    std::size_t f) {
  RationalVector x(ech.cols);
  x[f] = 1;
  auto start = std::upper_bound(pivot_cols.begin(), pivot_cols.end(), f);
  for (auto it = start; it != pivot_cols.end(); ++it) {
    const auto& row = ech.pivot_rows[*ech.pivot_of_col[*it]];
    mpq_class acc = 0;
    for (std::size_t k = 0; k + 1 < row.size(); ++k) {
      const auto& xv = x[row[k].first];
      if (!xv.is_zero()) acc += xv.raw() * row[k].second;
    }
    if (sgn(acc) != 0) x[*it] = Rational(mpq_class(-acc / row.back().second));
  }
  return x;
}

inline std::vector<std::size_t> pivot_columns(const ReverseEchelon& ech) {
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < ech.cols; ++c)
    if (ech.pivot_of_col[c]) cols.push_back(c);
  return cols;
}

}  // namespace detail

/// Canonical basis of the right nullspace: the reduced row-echelon form of
/// the solution space. Each vector has a leading 1 at a free column, zeros at
/// every other free column, and vectors are ordered by leading column.
inline std::vector<RationalVector> nullspace(const SparseMatrix& m) {
  const auto ech = detail::reverse_echelon(m);
  const auto pivot_cols = detail::pivot_columns(ech);
  std::vector<RationalVector> basis;
  for (std::size_t f = 0; f < m.cols(); ++f)
    if (!ech.pivot_of_col[f]) basis.push_back(detail::kernel_vector(ech, pivot_cols, f));
  return basis;
}

/// Solution of A u = b with every free variable set to zero, or nothing when
/// the system is inconsistent.
inline std::optional<RationalVector> particular_solution(const SparseMatrix& a, const RationalVector& b) {
  if (b.size() != a.rows()) throw std::invalid_argument("particular_solution: rhs size mismatch");
  // Column 0 holds -b; a kernel vector of [-b | A] with leading 1 at column 0
  // exists iff b lies in the column span of A.
  SparseMatrix aug(0, a.cols() + 1);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    SparseMatrix::Row row;
    if (!b[r].is_zero()) row.emplace_back(0, -b[r]);
    for (const auto& [c, v] : a.row(r)) row.emplace_back(c + 1, v);
    aug.add_row(std::move(row));
  }
  const auto ech = detail::reverse_echelon(aug);
  if (ech.pivot_of_col[0]) return std::nullopt;
  RationalVector x = detail::kernel_vector(ech, detail::pivot_columns(ech), 0);
  return RationalVector(x.begin() + 1, x.end());
}

/// Reduced row-echelon form of a list of row vectors, zero rows dropped.
inline std::vector<RationalVector> rref_rows(std::vector<RationalVector> rows) {
  std::vector<RationalVector> out;
  if (rows.empty()) return out;
  const std::size_t n = rows.front().size();
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < rows.size(); ++col) {
    std::size_t piv = r;
    while (piv < rows.size() && rows[piv][col].is_zero()) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[r]);
    Rational inv = Rational(1) / rows[r][col];
    for (auto& x : rows[r])
      if (!x.is_zero()) x *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][col].is_zero()) continue;
      Rational f = rows[i][col];
      for (std::size_t c = col; c < n; ++c)
        if (!rows[r][c].is_zero()) rows[i][c] -= f * rows[r][c];
    }
    ++r;
  }
  rows.resize(r);
  return rows;
}

inline std::vector<RationalVector> nullspace(const RationalMatrix& m) {
  return nullspace(SparseMatrix::from_dense(m));
}

/// Rank of a list of vectors (rows).
inline std::size_t rank_of_vectors(const std::vector<RationalVector>& vs, std::size_t dim) {
  SparseMatrix s(0, dim);
  for (const auto& v : vs) {
    SparseMatrix::Row row;
    for (std::size_t c = 0; c < v.size(); ++c)
      if (!v[c].is_zero()) row.emplace_back(c, v[c]);
    s.add_row(std::move(row));
  }
  return rank(s);
}

}  // namespace ktk
