#pragma once

#include <utility>
#include <vector>

#include "witt/poly.hpp"

namespace witt {

// content * product of factor^multiplicity reproduces the input exactly;
// factors are monic, irreducible over Q, pairwise distinct, sorted by
// (degree, coefficients).
struct Factorization {
  Rat content;
  std::vector<std::pair<PolyQ, int>> factors;
  PolyQ expand() const;
  // Multiplicity of a monic factor, 0 when absent.
  int multiplicity(const PolyQ& h) const;
};

// Complete irreducible factorization over Q; f nonzero. Squarefree split by
// Yun's algorithm, then per part: reduction mod a good prime, Hensel lifting
// to the Mignotte bound, bounded subset recombination.
Factorization factor_q(const PolyQ& f);

// True iff F = G * reverse_bar(G) for some rational G with G(0) != 0:
// symmetric irreducible factors occur with even multiplicity, non-symmetric
// ones with the same multiplicity as their monic reversal, and the residual
// scalar is a square. Requires F(0) != 0.
bool is_ffbar(const PolyQ& f);

// Fox-Milnor equivalence: some F, G with F*F̄*P = G*Ḡ*Q. Decided by the
// is_ffbar rule on the multiplicity-difference profile of P against Q.
// Requires P(0), Q(0) != 0.
bool fm_equivalent(const PolyQ& p, const PolyQ& q);

}  // namespace witt
