#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "witt/matrix.hpp"
#include "witt/padic.hpp"
#include "witt/rational.hpp"

namespace witt {

// Symmetric bilinear form over Q, possibly degenerate.
struct SymForm {
  QMat gram;

  explicit SymForm(QMat g);  // throws std::invalid_argument unless symmetric
  std::size_t dim() const { return gram.rows(); }
};

// Exact congruence diagonalization: basis^T gram basis equals
// diag(entries..., 0, ..., 0) with `radical` trailing zeros and every
// entry a squarefree nonzero integer (square scaling folded into basis).
struct Diagonalization {
  std::vector<Int> entries;
  std::size_t radical = 0;
  QMat basis;
};

// Symmetric Gaussian reduction with first-index pivoting; when every
// remaining diagonal entry vanishes but some off-diagonal b(x_i,x_j) does
// not, the rank-2 fix x_i <- x_i + x_j restores a usable pivot.
Diagonalization diagonalize(const SymForm& s);

// prod_{i<j} (a_i, a_j)_v over the nondegenerate entries (the strict i < j
// convention; empty and single-entry products are +1).
int hasse(const Diagonalization& d, const Place& v);

// Witt coindex of the nondegenerate part at one place: |signature| at the
// real place; over Q_p the four-valued table in terms of
// d~ = (-1)^l d and e~ = (-1,d)^l (-1,-1)^(l(l+1)/2) e with l = floor(n/2)
// [Ser, Ch. IV]. The radical is the caller's business.
long beta_local(const Diagonalization& d, const Place& v);

// Everything beta_global computes, kept for reports. Places are surveyed
// in the order: real, 2, then the odd primes of P ascending; off-survey
// places provably attain the minimal local coindex (n mod 2).
struct FormInvariants {
  std::size_t n = 0;        // ambient dimension
  std::size_t radical = 0;  // r
  long signature = 0;       // of the nondegenerate part
  Int disc = 1;             // squarefree class of prod(entries)
  std::vector<Int> odd_primes;                  // P minus {2}
  std::vector<std::pair<Place, int>> hasse_at;  // per surveyed place
  std::vector<std::pair<Place, long>> beta_at;  // nondegenerate part
  long beta = 0;  // global coindex; degenerate forms: beta_nd - r
};

// Global Witt coindex beta = max over the real place, 2, and the primes
// dividing prod(entries) but not all entries; beta of a degenerate form is
// beta of the nondegenerate part minus the radical dimension.
FormInvariants beta_global(const SymForm& s);

// Greedy search for a totally isotropic subspace: enumerate primitive
// integer vectors ordered by coordinate height then lexicographically; on
// the first isotropic hit, restrict to (orthogonal complement)/(found
// vector) and repeat. Returns ambient primitive integer vectors, or
// nullopt when nothing was found. One-sided: absence of a witness proves
// nothing, and the subspace need not be maximal (the search stops at
// height_bound and at an internal node budget; definite restrictions are
// skipped outright).
std::optional<std::vector<std::vector<Int>>> isotropic_witness(
    const SymForm& s, long height_bound);

}  // namespace witt
