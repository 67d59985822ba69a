#pragma once

#include <cstdlib>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ktk/equations.hpp"
#include "ktk/linalg.hpp"
#include "ktk/tensors.hpp"

namespace ktk {

/// Raised when the requested conformal system has infinitely many
/// polynomial solutions (m <= 2) and no degree cap was given.
class InfiniteFamilyError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct AnsatzSpec {
  Kind kind = Kind::ordinary;
  int j = 1;
  int s = 1;
  Signature signature{};
  std::optional<int> max_degree;

  /// Degree cap actually used: j+s-1 for ordinary tensors, 2(j+s-1) for
  /// conformal tensors when m >= 3.
  int degree_bound() const {
    if (max_degree) {
      if (*max_degree < 0) throw std::invalid_argument("AnsatzSpec: max_degree must be >= 0");
      return *max_degree;
    }
    if (kind == Kind::ordinary) return j + s - 1;
    if (signature.dim() <= 2)
      throw InfiniteFamilyError("conformal Killing tensors in dimension " + std::to_string(signature.dim()) +
                                " form an infinite family (Cauchy-Riemann type system); pass an explicit max_degree");
    return 2 * (j + s - 1);
  }
  void validate() const {
    if (j < 0) throw std::invalid_argument("AnsatzSpec: rank j must be >= 0");
    if (s < 1) throw std::invalid_argument("AnsatzSpec: order s must be >= 1");
    (void)degree_bound();
  }
};

inline unsigned thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("KTK_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return std::min(hw, static_cast<unsigned>(v));
  }
  return hw;
}

namespace detail {

/// Runs fn(i) for i in [0, n) on up to thread_budget() threads. Each index
/// writes only its own output slot, so results do not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned threads = std::min<std::size_t>(thread_budget(), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Coefficient-matching system for the homogeneous degree-d part of the
/// ansatz. Columns: (monomial of degree d, component), monomial-major.
inline SparseMatrix degree_block_system(Kind kind, int j, int s, Signature sig, int d,
                                        const std::vector<SymMultiIndex>& comps,
                                        const TracelessProjector* projector) {
  const std::size_t m = sig.dim();
  const auto monos = monomials_of_degree(m, d);
  const std::size_t ncols = monos.size() * comps.size();
  struct KeyLess {
    bool operator()(const std::pair<SymMultiIndex, Monomial>& a, const std::pair<SymMultiIndex, Monomial>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return GradedLex{}(a.second, b.second);
    }
  };
  std::map<std::pair<SymMultiIndex, Monomial>, SparseMatrix::Row, KeyLess> eqs;
  std::map<std::pair<SymMultiIndex, Monomial>, SparseMatrix::Row, KeyLess> trace_eqs;
  for (std::size_t mi = 0; mi < monos.size(); ++mi)
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
      const std::size_t col = mi * comps.size() + ci;
      SymTensorField unit(j, sig);
      unit.set(comps[ci], Poly(monos[mi], 1));
      SymTensorField res = killing_residual(unit, s);
      if (kind == Kind::conformal) {
        res = (*projector)(res);
        if (j >= 2) {
          const SymTensorField tr = trace(unit);
          for (const auto& [idx, p] : tr.components())
            for (const auto& [mono, c] : p.terms()) trace_eqs[{idx, mono}].emplace_back(col, c);
        }
      }
      for (const auto& [idx, p] : res.components())
        for (const auto& [mono, c] : p.terms()) eqs[{idx, mono}].emplace_back(col, c);
    }
  SparseMatrix sys(0, ncols);
  for (auto& [_, row] : eqs) sys.add_row(std::move(row));
  for (auto& [_, row] : trace_eqs) sys.add_row(std::move(row));
  return sys;
}

}  // namespace detail

/// Complete basis of polynomial (conformal) Killing tensors of degree at
/// most spec.degree_bound(), in canonical reduced echelon form over the
/// (monomial, component) coordinates.
inline Basis solve_basis(const AnsatzSpec& spec) {
  spec.validate();
  const int bound = spec.degree_bound();
  const Signature sig = spec.signature;
  const auto comps = enumerate_indices(spec.j, sig.dim());
  std::optional<TracelessProjector> projector;
  if (spec.kind == Kind::conformal) projector.emplace(spec.j + spec.s, sig);

  std::vector<std::vector<RationalVector>> block_kernels(static_cast<std::size_t>(bound) + 1);
  detail::parallel_for(block_kernels.size(), [&](std::size_t d) {
    SparseMatrix sys = detail::degree_block_system(spec.kind, spec.j, spec.s, sig, static_cast<int>(d), comps,
                                                   projector ? &*projector : nullptr);
    block_kernels[d] = nullspace(sys);
  });

  Basis basis;
  basis.kind = spec.kind;
  basis.j = spec.j;
  basis.s = spec.s;
  basis.signature = sig;
  basis.degree_bound = bound;
  for (std::size_t d = 0; d < block_kernels.size(); ++d) {
    const auto monos = monomials_of_degree(sig.dim(), static_cast<int>(d));
    for (const auto& v : block_kernels[d]) {
      SymTensorField f(spec.j, sig);
      for (std::size_t col = 0; col < v.size(); ++col)
        if (!v[col].is_zero()) f.add(comps[col % comps.size()], Poly(monos[col / comps.size()], v[col]));
      basis.elements.push_back(std::move(f));
    }
  }
  return basis;
}

/// True when raising the degree cap by two adds no solutions.
inline bool saturation_check(const AnsatzSpec& spec) {
  const int bound = spec.degree_bound();
  AnsatzSpec higher = spec;
  higher.max_degree = bound + 2;
  AnsatzSpec fixed = spec;
  fixed.max_degree = bound;
  return solve_basis(fixed).size() == solve_basis(higher).size();
}

struct RankReport {
  int j = 0;
  int k = 0;
  int s = 1;
  Signature signature{};
  BigInt equations;
  BigInt unknowns;
  std::size_t rank = 0;
  bool full_row_rank = false;
  bool maximal_rank = false;  // rank == min(equations, unknowns)
};

/// Exact rank of the k-th prolongation; full_row_rank means every equation
/// is independent. For k > j at order s >= 2 there are more equations than
/// unknowns, and maximal_rank (full column rank) is the attainable form.
inline RankReport full_rank_check(int j, int k, int s, Signature sig) {
  ProlongedSystem sys = prolong(j, k, s, sig);
  RankReport r;
  r.j = j;
  r.k = k;
  r.s = s;
  r.signature = sig;
  auto counts = count_eq_unknowns(j, k, s, static_cast<int>(sig.dim()));
  r.equations = counts.equations;
  r.unknowns = counts.unknowns;
  r.rank = ktk::rank(sys.matrix);
  const BigInt rk(static_cast<unsigned long>(r.rank));
  r.full_row_rank = rk == r.equations;
  r.maximal_rank = rk == (r.equations < r.unknowns ? r.equations : r.unknowns);
  return r;
}

/// Rank of a set of same-shape fields, computed on their monomial
/// coordinates.
inline std::size_t span_rank(const std::vector<SymTensorField>& fields, int rank_j, Signature sig) {
  int deg = 0;
  for (const auto& f : fields) deg = std::max(deg, f.degree());
  FieldCoordinates coords(rank_j, sig, deg);
  std::vector<RationalVector> vs;
  vs.reserve(fields.size());
  for (const auto& f : fields) vs.push_back(coords.coordinates(f));
  return rank_of_vectors(vs, coords.size());
}

/// Mutual span containment via exact ranks.
inline bool same_span(const std::vector<SymTensorField>& a, const std::vector<SymTensorField>& b, int rank_j,
                      Signature sig) {
  std::vector<SymTensorField> both = a;
  both.insert(both.end(), b.begin(), b.end());
  std::size_t ra = span_rank(a, rank_j, sig), rb = span_rank(b, rank_j, sig), rab = span_rank(both, rank_j, sig);
  return ra == rab && rb == rab;
}

inline bool in_span(const SymTensorField& f, const std::vector<SymTensorField>& span, int rank_j, Signature sig) {
  std::vector<SymTensorField> both = span;
  both.push_back(f);
  return span_rank(both, rank_j, sig) == span_rank(span, rank_j, sig);
}

/// Reduced row-echelon form of the span over the solver's (monomial,
/// component) coordinates. Solver output is already in this form.
inline Basis canonical_basis(const Basis& b) {
  Basis out = b;
  out.elements.clear();
  int deg = 0;
  for (const auto& f : b.elements) deg = std::max(deg, f.degree());
  FieldCoordinates coords(b.j, b.signature, deg);
  std::vector<RationalVector> rows;
  for (const auto& f : b.elements) rows.push_back(coords.coordinates(f));
  for (const auto& r : rref_rows(std::move(rows))) out.elements.push_back(coords.field(r, b.j, b.signature));
  return out;
}

/// Outcome of re-checking a basis: residuals and independence.
struct BasisVerification {
  bool ok = true;
  bool independent = true;
  std::vector<std::string> failures;
};

/// Failure messages number elements from 1, like the JSON indices.
inline BasisVerification verify_basis(const Basis& b) {
  BasisVerification out;
  for (std::size_t i = 0; i < b.elements.size(); ++i) {
    const auto& f = b.elements[i];
    if (f.rank() != b.j || !(f.signature() == b.signature)) {
      out.ok = false;
      out.failures.push_back("element " + std::to_string(i + 1) + ": rank/signature mismatch");
      continue;
    }
    if (b.kind == Kind::conformal && !is_traceless(f)) {
      out.ok = false;
      out.failures.push_back("element " + std::to_string(i + 1) + ": not traceless");
      continue;
    }
    SymTensorField res = defining_residual(b.kind, f, b.s);
    if (!res.is_zero()) {
      out.ok = false;
      const auto& [idx, p] = *res.components().begin();
      out.failures.push_back("element " + std::to_string(i + 1) + ": nonzero residual at index " + idx.str() + ": " +
                             p.str());
    }
  }
  if (!b.elements.empty() && span_rank(b.elements, b.j, b.signature) != b.elements.size()) {
    out.ok = false;
    out.independent = false;
    out.failures.push_back("elements are linearly dependent");
  }
  return out;
}

}  // namespace ktk
