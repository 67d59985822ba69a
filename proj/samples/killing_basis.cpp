// Prints the Killing vectors of Minkowski space (1,3) and checks that each
// first-order operator built from them commutes with the wave operator.

#include <iostream>

#include "ktk/ktk.hpp"

int main() {
  const ktk::Signature sig(1, 3);
  const auto basis = ktk::solve_basis(ktk::AnsatzSpec{ktk::Kind::ordinary, 1, 1, sig, std::nullopt});
  std::cout << "killing vectors in " << sig.str() << ": " << basis.size() << "\n";

  const auto l = ktk::kgf(sig, ktk::Rational(0));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto q = ktk::build_symmetry_operator(basis.elements[i]);
    const bool ok = ktk::commutator(q, l.box()).is_zero();
    std::cout << "  [" << i + 1 << "] " << basis.elements[i].str() << "\n"
              << "      Q = " << q.str() << (ok ? "  commutes" : "  FAILS") << "\n";
  }
  std::cout << "closed under commutators: " << (ktk::lie_closure_check(ktk::vector_operators(basis)) ? "yes" : "no")
            << "\n";
}
