#pragma once

// JSON forms of the library types. Rationals travel as decimal strings so the
// output is exact and identical across platforms.

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ktk/equations.hpp"
#include "ktk/operators.hpp"
#include "ktk/poly.hpp"
#include "ktk/solver.hpp"
#include "ktk/tensors.hpp"

namespace ktk {

using Json = nlohmann::ordered_json;

inline Json to_json(const Poly& p) {
  Json arr = Json::array();
  for (const auto& [m, c] : p.terms())
    arr.push_back(Json{{"exps", m.exponents()}, {"num", c.num_str()}, {"den", c.den_str()}});
  return arr;
}

namespace detail {
inline Rational rational_from(const Json& j) {
  return Rational::from_strings(j.at("num").get<std::string>(), j.at("den").get<std::string>());
}
inline Monomial monomial_from(const Json& j, std::size_t dim) {
  auto e = j.get<std::vector<int>>();
  if (e.size() != dim) throw std::invalid_argument("json: exponent vector has wrong length");
  return Monomial(e);
}
}  // namespace detail

inline Poly poly_from_json(const Json& j, std::size_t dim) {
  if (!j.is_array()) throw std::invalid_argument("json: polynomial must be an array");
  Poly p(dim);
  for (const auto& t : j) p.add_term(detail::monomial_from(t.at("exps"), dim), detail::rational_from(t));
  return p;
}

inline Json to_json(const SymTensorField& f) {
  Json comps = Json::array();
  for (const auto& [idx, p] : f.components()) {
    std::vector<int> one_based;
    for (std::size_t i = 0; i < idx.size(); ++i) one_based.push_back(idx[i] + 1);
    comps.push_back(Json{{"index", one_based}, {"poly", to_json(p)}});
  }
  return Json{{"rank", f.rank()},
              {"signature", {f.signature().p, f.signature().q}},
              {"components", std::move(comps)}};
}

inline Signature signature_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("json: signature must be [p, q]");
  return Signature(j[0].get<int>(), j[1].get<int>());
}

inline SymTensorField field_from_json(const Json& j) {
  const int rank = j.at("rank").get<int>();
  const Signature sig = signature_from_json(j.at("signature"));
  SymTensorField f(rank, sig);
  for (const auto& c : j.at("components")) {
    std::vector<int> idx;
    for (int v : c.at("index").get<std::vector<int>>()) {
      if (v < 1) throw std::invalid_argument("json: indices are 1-based");
      idx.push_back(v - 1);
    }
    f.add(SymMultiIndex::from_ints(idx), poly_from_json(c.at("poly"), sig.dim()));
  }
  return f;
}

inline Json to_json(const Basis& b) {
  Json elems = Json::array();
  for (const auto& f : b.elements) elems.push_back(to_json(f));
  return Json{{"kind", to_string(b.kind)},
              {"j", b.j},
              {"s", b.s},
              {"signature", {b.signature.p, b.signature.q}},
              {"degree_bound", b.degree_bound},
              {"count", b.elements.size()},
              {"elements", std::move(elems)}};
}

inline Basis basis_from_json(const Json& j) {
  Basis b;
  b.kind = kind_from_string(j.at("kind").get<std::string>());
  b.j = j.at("j").get<int>();
  b.s = j.at("s").get<int>();
  b.signature = signature_from_json(j.at("signature"));
  b.degree_bound = j.at("degree_bound").get<int>();
  for (const auto& e : j.at("elements")) b.elements.push_back(field_from_json(e));
  if (j.at("count").get<std::size_t>() != b.elements.size())
    throw std::invalid_argument("json: basis count does not match element list");
  return b;
}

inline Json to_json(const SparseMatrix& m) {
  Json entries = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (const auto& [c, v] : m.row(r)) entries.push_back(Json::array({r, c, v.num_str(), v.den_str()}));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline SparseMatrix sparse_matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  SparseMatrix m(0, j.at("cols").get<std::size_t>());
  std::vector<SparseMatrix::Row> data(rows);
  for (const auto& e : j.at("entries")) {
    auto r = e.at(0).get<std::size_t>();
    if (r >= rows) throw std::invalid_argument("json: matrix row out of range");
    data[r].emplace_back(e.at(1).get<std::size_t>(),
                         Rational::from_strings(e.at(2).get<std::string>(), e.at(3).get<std::string>()));
  }
  for (auto& row : data) m.add_row(std::move(row));
  return m;
}

inline Json to_json(const WeylOp& op) {
  Json arr = Json::array();
  for (const auto& [t, c] : op.terms())
    arr.push_back(Json{{"x_exps", t.x.exponents()},
                       {"d_exps", t.d.exponents()},
                       {"num", c.num_str()},
                       {"den", c.den_str()}});
  return arr;
}

inline WeylOp weyl_op_from_json(const Json& j, std::size_t dim) {
  WeylOp op(dim);
  for (const auto& t : j)
    op.add_term(detail::monomial_from(t.at("x_exps"), dim), detail::monomial_from(t.at("d_exps"), dim),
                detail::rational_from(t));
  return op;
}

inline Json to_json(const RankReport& r) {
  return Json{{"j", r.j},
              {"k", r.k},
              {"s", r.s},
              {"signature", {r.signature.p, r.signature.q}},
              {"equations", r.equations.get_str()},
              {"unknowns", r.unknowns.get_str()},
              {"rank", r.rank},
              {"full_row_rank", r.full_row_rank},
              {"maximal_rank", r.maximal_rank}};
}

/// {"kind", "m", "j", "s", "count"}; the count is a JSON number when it fits
/// in 64 bits and a decimal string otherwise.
inline Json count_json(const std::string& kind, int m, int j, int s, const BigInt& n) {
  Json c = n.fits_slong_p() ? Json(n.get_si()) : Json(n.get_str());
  return Json{{"kind", kind}, {"m", m}, {"j", j}, {"s", s}, {"count", std::move(c)}};
}

/// Canonical text form: two-space indent, trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return Json::parse(in);
}

}  // namespace ktk
