#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "witt/matrix.hpp"
#include "witt/padic.hpp"
#include "witt/poly.hpp"
#include "witt/quadform.hpp"
#include "witt/seifert.hpp"

namespace witt {

// Isometric structure (Q, T): Q nonsingular symmetric, T^T Q T = Q. The
// stored delta is det(I - tT), so Delta_A = det(A) * delta holds for the
// source matrix of iso_structure.
struct IsoStructure {
  QMat q;
  QMat t;
  PolyQ delta;

  IsoStructure(QMat q_in, QMat t_in);  // validates both identities exactly
  std::size_t dim() const { return q.rows(); }
};

// A -> (A + A^T, A^{-1} A^T). Singular A is rejected; callers run
// make_nonsingular first.
IsoStructure iso_structure(const SeifertMatrix& a);

// Q (I + T)^{-1}: exact inverse of iso_structure (recovers A bit for bit).
QMat seifert_of(const IsoStructure& s);

// delta-primary component over Q. For a symmetric irreducible delta the
// restricted Gram is nonsingular and the component is an orthogonal
// summand. A non-symmetric factor is grouped with its monic reversal into
// a single component that is metabolic for structural reasons; its Gram
// is kept for inspection but never obstructs.
struct PrimaryComponent {
  PolyQ delta;          // monic irreducible factor (pairs: the smaller one)
  int multiplicity = 0; // in det(I - tT)
  bool auto_metabolic = false;  // non-symmetric pair V_d + V_d*
  QMat basis;           // columns span ker delta(T)^multiplicity (pairs: sum)
  QMat gram;            // basis^T Q basis
  QMat t;               // T restricted to the component, basis coordinates
};

// Components over Q, ordered by (degree, coefficients) of delta. Distinct
// components are orthogonal; the sum of bases spans the whole space.
std::vector<PrimaryComponent> primary_components(const IsoStructure& s);

// p-adic primary component, certified mod p^certified. Entries of basis
// and gram are balanced representatives; gram_scale records the power of
// p that was multiplied in to clear denominators, so the component form
// is p^-gram_scale times the stored gram.
struct PadicComponent {
  PadicPoly delta;
  int multiplicity = 0;
  bool auto_metabolic = false;
  std::vector<std::vector<Int>> basis;
  std::vector<std::vector<Int>> gram;
  long gram_scale = 0;
  long certified = 0;
};

// Components over Q_p at working precision N: the rational factors of
// det(I - tT) are refined by factor_qp and one component is built per
// Q_p-irreducible symmetric factor (pairs grouped as over Q). Throws
// precision_error when N cannot certify the kernels.
std::vector<PadicComponent> primary_components(const IsoStructure& s,
                                               const Int& p, long N);

// Levine's reduction: while the minimal polynomial of the restricted T is
// delta^a with a > 1, replace the component by W-perp/W for
// W = delta(T)^(a-1) V. Dimension drops by 2 dim W each round; the result
// has minimal polynomial delta, or dimension 0 when the component was
// metabolic. Only called on symmetric components.
PrimaryComponent reduce_to_minimal_polynomial(const PrimaryComponent& c);

// Standard coindex-one matrix of an antipalindromic P of odd degree 2n+1
// with P(0) != 0: the inverse of the butterfly block matrix
// [[0, M_{n+1}^T], [M_n, 0]] built from upper-triangular Toeplitz blocks
// of the coefficients c_0..c_n of P. Postconditions checked internally:
// A_P^{-1} A_P^T is the companion matrix of P and
// Delta_{A_P} = c_0^{-2(n+1)} P.
SeifertMatrix std_coindex_one(const PolyQ& p);

// One failed test of the decision engine. step is one of "signature",
// "factor-parity", "t-minus-1", "local"; place is set for "signature"
// (real) and "local" (Q_p); factor names the polynomial involved; detail
// is a human-readable sentence and data carries the same facts as
// key/value pairs for the report layer.
struct Obstruction {
  std::string step;
  std::optional<Place> place;
  std::string factor;
  std::string detail;
  std::vector<std::pair<std::string, std::string>> data;
};

struct DecisionOutcome {
  enum class Verdict { yes, no, inapplicable };
  Verdict verdict = Verdict::inapplicable;
  std::vector<Obstruction> obstructions;  // nonempty iff verdict == no
  std::vector<std::string> trail;         // steps executed, in order
  std::string note;                       // diagnostics for inapplicable

  bool passed() const { return verdict == Verdict::yes; }
};

struct EngineOptions {
  long padic_start = 16;   // initial p-adic working precision
  long padic_limit = 1024; // doubling cap; exceeded -> inapplicable
  std::vector<Int> primes; // nonempty: replaces the computed prime set
  bool all_obstructions = false;  // keep testing after the first failure
};

// Decides whether the even-dimensional A is metabolic. Pipeline: per-side
// make_nonsingular, signature function over the circle, parity of the
// multiplicities of symmetric irreducible factors, the (t-1)-component
// Witt test over Q, then local Witt tests at 2 and every prime dividing
// det and the discriminant of the squarefree symmetric part. Returns
// inapplicable (never a wrong verdict) for Delta = 0, Delta(-1) = 0, or
// p-adic precision exhaustion. Odd dimension is rejected outright.
DecisionOutcome is_metabolic(const SeifertMatrix& a,
                             const EngineOptions& opt = {});

// beta(A) = 1 test for odd-dimensional A with Delta_A(-1) != 0, via
// metabolicity of A + (-Std(Delta_A)). Even dimension is rejected.
DecisionOutcome is_coindex_one(const SeifertMatrix& a,
                               const EngineOptions& opt = {});

// Concordance of two matrices of equal size parity: metabolicity of
// A + (-B). Parity mismatch yields inapplicable.
DecisionOutcome concordant(const SeifertMatrix& a, const SeifertMatrix& b,
                           const EngineOptions& opt = {});

}  // namespace witt
