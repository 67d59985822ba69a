#pragma once

// Command-line front end. run() takes the argument list and two streams so
// the same code path serves the executable and the tests.
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 for an
// invalid configuration or unreadable input.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ktk/constructors.hpp"
#include "ktk/operators.hpp"
#include "ktk/serialize.hpp"
#include "ktk/solver.hpp"

namespace ktk::cli {

enum class Format { json, text };

struct RunConfig {
  std::string command;
  std::optional<int> p, q, m;
  int j = 1;
  int s = 1;
  int k = 0;
  std::string kind = "ordinary";
  std::optional<int> max_degree;
  std::string output;
  std::string input;
  std::string export_matrix;
  std::string kappa2 = "0";
  Format format = Format::json;
  bool solve = false;
  bool construct = false;
  bool closure = false;
  bool emit_operators = false;
  bool progress = false;

  Signature signature() const {
    if (m && (p || q)) throw std::invalid_argument("give either --m or --p/--q, not both");
    if (m) return Signature::euclidean(*m);
    if (!p && !q) throw std::invalid_argument("signature required: --p/--q or --m");
    return Signature(p.value_or(0), q.value_or(0));
  }
};

namespace detail {

inline Json signature_json(Signature sig) { return Json::array({sig.p, sig.q}); }

class Runner {
 public:
  Runner(const RunConfig& cfg, std::ostream& out, std::ostream& err) : cfg_(cfg), out_(out), err_(err) {}

  int dispatch() {
    if (cfg_.command == "count") return count();
    if (cfg_.command == "basis") return basis();
    if (cfg_.command == "verify") return verify();
    if (cfg_.command == "op-check") return op_check();
    if (cfg_.command == "prolong-rank") return prolong_rank();
    throw std::invalid_argument("unknown command '" + cfg_.command + "'");
  }

 private:
  void progress(const std::string& msg) {
    if (cfg_.progress) err_ << "[ktk] " << msg << std::endl;
  }

  void emit(const std::string& text) {
    if (cfg_.output.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(cfg_.output, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write '" + cfg_.output + "'");
    f << text;
  }
  void emit(const Json& j) { emit(dump(j)); }

  void check_ranks() const {
    if (cfg_.j < 0) throw std::invalid_argument("--rank must be >= 0");
    if (cfg_.s < 0) throw std::invalid_argument("--order must be >= 0");
  }

  Basis load_basis() const {
    if (cfg_.input.empty()) throw std::invalid_argument("an input basis file is required");
    try {
      return basis_from_json(read_json_file(cfg_.input));
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("malformed basis file: ") + e.what());
    }
  }

  int count() {
    check_ranks();
    const Signature sig = cfg_.signature();
    const int m = static_cast<int>(sig.dim());
    const CountKind kind = count_kind_from_string(cfg_.kind);
    const BigInt n = ktk::count(kind, m, cfg_.j, cfg_.s);
    Json report = count_json(cfg_.kind, m, cfg_.j, cfg_.s, n);
    bool ok = true;
    std::optional<std::size_t> solved;
    if (cfg_.solve) {
      if (kind != CountKind::ordinary && kind != CountKind::conformal)
        throw std::invalid_argument("--solve applies to the ordinary and conformal kinds");
      progress("solving " + cfg_.kind + " j=" + std::to_string(cfg_.j) + " s=" + std::to_string(cfg_.s) + " in " +
               sig.str());
      Kind k = kind_from_string(cfg_.kind);
      solved = solve_basis(AnsatzSpec{k, cfg_.j, cfg_.s, sig, cfg_.max_degree}).size();
      ok = BigInt(static_cast<unsigned long>(*solved)) == n;
      report["solver_dimension"] = *solved;
      report["agrees"] = ok;
    }
    if (cfg_.format == Format::json) emit(report);
    else emit(n.get_str() + (solved ? " " + std::to_string(*solved) : "") + "\n");
    return ok ? 0 : 1;
  }

  int basis() {
    check_ranks();
    const Signature sig = cfg_.signature();
    const Kind kind = kind_from_string(cfg_.kind);
    Basis b;
    if (cfg_.construct) {
      if (cfg_.max_degree) throw std::invalid_argument("--construct does not take --max-degree");
      progress("constructing basis from lemma products");
      ConstructedBasis cb = build_order_s_basis(kind, cfg_.j, cfg_.s, sig);
      if (cb.solver_fallback) progress("lemma candidates fell short of the count; using the solver basis");
      b = canonical_basis(cb.basis);
      b.degree_bound = AnsatzSpec{kind, cfg_.j, cfg_.s, sig, std::nullopt}.degree_bound();
    } else {
      AnsatzSpec spec{kind, cfg_.j, cfg_.s, sig, cfg_.max_degree};
      spec.validate();
      progress("solving ansatz up to degree " + std::to_string(spec.degree_bound()));
      b = solve_basis(spec);
    }
    progress("basis has " + std::to_string(b.size()) + " elements");
    if (cfg_.format == Format::json) {
      emit(to_json(b));
    } else {
      std::ostringstream os;
      os << "# kind=" << to_string(b.kind) << " j=" << b.j << " s=" << b.s << " signature=" << b.signature.str()
         << " degree_bound=" << b.degree_bound << " count=" << b.size() << "\n";
      for (std::size_t i = 0; i < b.size(); ++i) os << i + 1 << "\t" << b.elements[i].str() << "\n";
      emit(os.str());
    }
    return 0;
  }

  int verify() {
    const Basis b = load_basis();
    progress("verifying " + std::to_string(b.size()) + " elements");
    const BasisVerification v = verify_basis(b);
    if (cfg_.format == Format::json) {
      emit(Json{{"ok", v.ok}, {"independent", v.independent}, {"count", b.size()}, {"failures", v.failures}});
    } else {
      std::ostringstream os;
      os << (v.ok ? "ok" : "FAILED") << " count=" << b.size() << "\n";
      for (const auto& f : v.failures) os << "  " << f << "\n";
      emit(os.str());
    }
    return v.ok ? 0 : 1;
  }

  int op_check() {
    if (cfg_.closure) return closure();
    const Basis b = load_basis();
    const KGFOperator l = kgf(b.signature, Rational::parse(cfg_.kappa2));
    bool all = true;
    Json elems = Json::array();
    std::ostringstream text;
    for (std::size_t i = 0; i < b.size(); ++i) {
      progress("element " + std::to_string(i + 1) + "/" + std::to_string(b.size()));
      WeylOp q = build_symmetry_operator(b.elements[i]);
      SymmetryReport r = check_symmetry(q, l);
      bool completed = false;
      if (!r.is_symmetry && b.kind == Kind::conformal && l.kappa_squared.is_zero()) {
        try {
          q = complete_symmetry_operator(q, b.signature).op;
          r = check_symmetry(q, l);
          completed = true;
        } catch (const std::domain_error&) {
        }
      }
      all = all && r.is_symmetry;
      Json e{{"index", i + 1},
             {"order", q.order()},
             {"is_symmetry", r.is_symmetry},
             {"lower_order_completion", completed},
             {"alpha", to_json(r.alpha)}};
      if (cfg_.emit_operators) e["operator"] = to_json(q);
      elems.push_back(std::move(e));
      text << i + 1 << "\t" << (r.is_symmetry ? "symmetry" : "NOT-symmetry") << (completed ? " (completed)" : "")
           << "\talpha=" << r.alpha.str() << "\n";
    }
    if (cfg_.format == Format::json)
      emit(Json{{"kind", to_string(b.kind)},
                {"j", b.j},
                {"s", b.s},
                {"signature", signature_json(b.signature)},
                {"kappa_squared", l.kappa_squared.str()},
                {"all_symmetries", all},
                {"elements", std::move(elems)}});
    else
      emit(text.str());
    return all ? 0 : 1;
  }

  /// Commutator table of the first-order operators of the Killing vectors.
  int closure() {
    const Signature sig = cfg_.signature();
    const auto gens = vector_operators(killing_vectors(sig));
    const ClosureReport r = lie_closure_table(gens);
    if (cfg_.format == Format::json) {
      Json table = Json::array();
      for (const auto& e : r.structure_constants) {
        Json coeffs = Json::array();
        for (std::size_t l = 0; l < e.coefficients.size(); ++l)
          if (!e.coefficients[l].is_zero()) coeffs.push_back(Json::array({l + 1, e.coefficients[l].str()}));
        table.push_back(Json{{"i", e.i + 1}, {"k", e.k + 1}, {"commutator", std::move(coeffs)}});
      }
      Json gen_json = Json::array();
      for (const auto& g : gens) gen_json.push_back(to_json(g));
      emit(Json{{"signature", signature_json(sig)},
                {"closed", r.closed},
                {"generators", std::move(gen_json)},
                {"structure_constants", std::move(table)}});
    } else {
      std::ostringstream os;
      os << (r.closed ? "closed" : "NOT-closed") << " generators=" << gens.size() << "\n";
      for (std::size_t i = 0; i < gens.size(); ++i) os << "G" << i + 1 << " = " << gens[i].str() << "\n";
      for (const auto& e : r.structure_constants) {
        os << "[G" << e.i + 1 << ", G" << e.k + 1 << "] =";
        bool any = false;
        for (std::size_t l = 0; l < e.coefficients.size(); ++l)
          if (!e.coefficients[l].is_zero()) {
            os << " " << (any && e.coefficients[l].sign() > 0 ? "+" : "") << e.coefficients[l] << "*G" << l + 1;
            any = true;
          }
        os << (any ? "" : " 0") << "\n";
      }
      emit(os.str());
    }
    return r.closed ? 0 : 1;
  }

  int prolong_rank() {
    check_ranks();
    if (cfg_.k < 0) throw std::invalid_argument("--k must be >= 0");
    if (cfg_.s < 1) throw std::invalid_argument("--order must be >= 1");
    const Signature sig = cfg_.signature();
    progress("prolonging j=" + std::to_string(cfg_.j) + " k=" + std::to_string(cfg_.k) + " s=" + std::to_string(cfg_.s));
    if (!cfg_.export_matrix.empty()) {
      std::ofstream f(cfg_.export_matrix, std::ios::binary);
      if (!f) throw std::invalid_argument("cannot write '" + cfg_.export_matrix + "'");
      f << dump(to_json(prolong(cfg_.j, cfg_.k, cfg_.s, sig).matrix));
    }
    const RankReport r = full_rank_check(cfg_.j, cfg_.k, cfg_.s, sig);
    if (cfg_.format == Format::json) emit(to_json(r));
    else
      emit("j=" + std::to_string(r.j) + " k=" + std::to_string(r.k) + " s=" + std::to_string(r.s) +
           " equations=" + r.equations.get_str() + " unknowns=" + r.unknowns.get_str() +
           " rank=" + std::to_string(r.rank) + " full_row_rank=" + (r.full_row_rank ? "yes" : "no") +
           " maximal_rank=" + (r.maximal_rank ? "yes" : "no") + "\n");
    return r.maximal_rank ? 0 : 1;
  }

  const RunConfig& cfg_;
  std::ostream& out_;
  std::ostream& err_;
};

inline void report_error(std::ostream& err, Format fmt, const std::string& type, const std::string& msg) {
  if (fmt == Format::json)
    err << Json{{"error", {{"type", type}, {"message", msg}, {"exit_code", 2}}}}.dump() << "\n";
  else
    err << "error: " << msg << "\n";
}

}  // namespace detail

inline void add_common(CLI::App* sub, RunConfig& cfg, bool signature, bool tensor) {
  if (signature) {
    sub->add_option("--p", cfg.p, "count of +1 metric entries");
    sub->add_option("--q", cfg.q, "count of -1 metric entries");
    sub->add_option("--m", cfg.m, "Euclidean dimension (shorthand for --p M --q 0)");
  }
  if (tensor) {
    sub->add_option("--rank,-j", cfg.j, "tensor rank j");
    sub->add_option("--order,-s", cfg.s, "order s");
  }
  sub->add_option("--output,-o", cfg.output, "write the report to a file instead of stdout");
  sub->add_option("--format", cfg.format, "json or text")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"json", Format::json}, {"text", Format::text}}));
  sub->add_flag("--progress", cfg.progress, "progress messages on stderr");
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Killing tensors and symmetry operators of the Klein-Gordon-Fock equation", "ktk"};
  app.require_subcommand(1);

  auto* count = app.add_subcommand("count", "closed-form count, optionally checked against the solver");
  add_common(count, cfg, true, true);
  count->add_option("--kind", cfg.kind, "ordinary, conformal, symmetry-operator or symmetry-operator-conformal");
  count->add_flag("--solve", cfg.solve, "also report the solver dimension");
  count->add_option("--max-degree", cfg.max_degree, "degree cap for --solve");

  auto* basis = app.add_subcommand("basis", "emit a basis of (conformal) Killing tensors");
  add_common(basis, cfg, true, true);
  basis->add_option("--kind", cfg.kind, "ordinary or conformal");
  basis->add_option("--max-degree", cfg.max_degree, "polynomial degree cap (required for conformal, m <= 2)");
  basis->add_flag("--construct", cfg.construct, "build from lemma products instead of the direct solve");

  auto* verify = app.add_subcommand("verify", "re-check the residuals and independence of a basis file");
  add_common(verify, cfg, false, false);
  verify->add_option("input", cfg.input, "basis JSON file")->required();

  auto* op = app.add_subcommand("op-check", "build symmetry operators from a basis file and check them");
  add_common(op, cfg, true, false);
  op->add_option("input", cfg.input, "basis JSON file");
  op->add_option("--kappa2", cfg.kappa2, "mass term kappa^2 as n or n/d");
  op->add_flag("--closure", cfg.closure, "commutator table of the first-order operators instead");
  op->add_flag("--emit-operators", cfg.emit_operators, "include each operator in the report");

  auto* pr = app.add_subcommand("prolong-rank", "exact rank of the k-th prolongation");
  add_common(pr, cfg, true, true);
  pr->add_option("--k", cfg.k, "prolongation order k");
  pr->add_option("--export-matrix", cfg.export_matrix, "write the matrix as sparse-triplet JSON");

  std::vector<std::string> argv_store;
  argv_store.emplace_back("ktk");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    detail::report_error(err, cfg.format, "invalid_config", e.what());
    return 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    detail::Runner runner(cfg, out, err);
    return runner.dispatch();
  } catch (const InfiniteFamilyError& e) {
    detail::report_error(err, cfg.format, "infinite_family", e.what());
  } catch (const std::invalid_argument& e) {
    detail::report_error(err, cfg.format, "invalid_config", e.what());
  } catch (const std::exception& e) {
    detail::report_error(err, cfg.format, "error", e.what());
  }
  return 2;
}

}  // namespace ktk::cli
