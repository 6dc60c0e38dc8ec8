#pragma once

#include <climits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "witt/poly.hpp"
#include "witt/rational.hpp"

namespace witt {

// A place of Q: the real place or a finite prime p.
struct Place {
  bool is_real = false;
  Int p = 0;  // meaningful only when finite

  static Place real() { return Place{true, Int(0)}; }
  static Place prime(Int q) { return Place{false, std::move(q)}; }

  bool operator==(const Place& o) const {
    return is_real == o.is_real && (is_real || p == o.p);
  }
  // Real place first, then finite places by p; gives reports a fixed order.
  bool operator<(const Place& o) const {
    if (is_real != o.is_real) return is_real;
    return !is_real && p < o.p;
  }

  std::string label() const;  // "R", "Q_2", "Q_3", ...
  std::string key() const;    // "infinity", "2", ... (serialization keys)
};

// True iff nonzero r is a square in the completion at v. Real place: r > 0.
// Odd p: even valuation and quadratic-residue unit part. p = 2: even
// valuation and unit part = 1 mod 8. Exact; throws on r = 0.
bool is_square_local(const Rat& r, const Place& v);

// Hilbert symbol (a,b)_v in {+1,-1} for nonzero a, b, via the closed
// formulas of [Ser, Ch. III Thm. 1]: no approximation involved.
int hilbert(const Rat& a, const Rat& b, const Place& v);

// x with x^2 = a mod p^N for a unit square a (odd p: quadratic residue;
// p = 2: a = 1 mod 8). Tonelli-Shanks mod p, then Newton (odd p) or
// bit-fixing (p = 2) lifts. Throws std::invalid_argument on non-squares.
Int sqrt_mod_pN(const Int& a, const Int& p, long N);

// Sentinel valuation for zero coefficients in newton_polygon input.
inline constexpr long VAL_INF = LONG_MAX / 4;

// Lower Newton polygon of the points (i, vals[i]), i = 0..deg, where
// vals[i] = v_p(c_i) and entries >= VAL_INF mark zero coefficients.
// Returns the vertex list from (0, vals[0]) to (deg, vals[deg]); negated
// segment slopes are the root valuations.
std::vector<std::pair<long, long>> newton_polygon(const std::vector<long>& vals);

// Monic polynomial with coefficients reduced mod p^N. shift records the
// valuation of the variable substitution u = p^shift * t used to reach a
// p-integral model (0 whenever the input was already p-integral).
struct PadicPoly {
  Int p = 2;
  long N = 1;
  std::vector<Int> c;  // c[i] multiplies t^i; c.back() = 1
  long shift = 0;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  // Balanced-coefficient rendering, e.g. "t^2 - 20*t + 1".
  std::string str(const std::string& var = "t") const;
};

// Raised when a p-adic computation cannot certify its output at the
// requested precision even after internal retries.
struct precision_error : std::runtime_error {
  long attempted;
  precision_error(const std::string& what, long n);
};

// Raised when the ramified divisor search exhausts its candidate budget;
// carries the number of nodes visited. Never a wrong answer.
struct budget_error : std::runtime_error {
  unsigned long long attempted;
  budget_error(const std::string& what, unsigned long long n);
};

// Factorization over Q_p of a squarefree rational polynomial, certified
// mod p^N. Let F be the primitive integer model of the input and
// a = v_p(lc F). When a = 0 the factors are the monic irreducible factors
// of the input over Q_p and scale = 1; when a > 0 the substitution
// u = p^a t produces a p-integral monic model which is factored instead,
// and scale = p^a. In both cases input = lc * prod(monic factors) holds
// after the substitution, with lc the input's exact leading coefficient.
struct PadicFactorization {
  Int p = 2;
  long N = 1;
  Rat lc = 1;
  Rat scale = 1;
  std::vector<PadicPoly> factors;  // sorted: degree, then balanced coeffs
};

// Strategy: rational factors are split off first (each Q_p-irreducible
// factor divides exactly one Q-irreducible factor). Unramified pieces are
// factored mod p and Hensel-lifted. Ramified pieces go through coprime
// block lifting, Newton polygon analysis (pure-slope segments of length
// equal to the slope denominator are irreducible; power substitutions
// deflate t^k-composed models), closed-form quadratics via sqrt_mod_pN,
// and a bounded breadth-first divisor search whose survivors are
// certified by resultant-controlled pair lifting.
PadicFactorization factor_qp(const PolyQ& f, const Int& p, long N);

// Kernel of the Q_p-linear map approximated by a matrix known mod p^N
// (rows of integers). Smith-style column elimination with minimal-
// valuation pivoting; loss = sum of pivot valuations, certified = N - loss.
// Pivoting stops once every remaining entry has valuation >= N - loss:
// such entries cannot be told apart from the junk an approximate input
// leaves behind, so the reported kernel is the kernel of any matrix
// congruent to the input mod p^certified whose rank equals the pivot
// count. Basis vectors have balanced entries mod p^N and satisfy
// M v = 0 mod p^certified. Throws precision_error when certification
// is impossible.
struct PadicKernel {
  std::vector<std::vector<Int>> basis;
  long certified = 0;
  long loss = 0;
};
PadicKernel kernel_mod_pN(const std::vector<std::vector<Int>>& m, const Int& p,
                          long N);

// Congruence diagonalization of a symmetric matrix known mod p^N, with
// minimal-valuation pivoting (diagonal pivots preferred; an off-diagonal
// minimum is pulled onto the diagonal by x_i -> x_i +- x_j, which at p = 2
// costs at most two extra valuation units). Basis vectors are rescaled by
// powers of p when needed; this changes diagonal entries by squares only.
// certified = N - loss with loss the sum of pivot valuations.
struct PadicDiagonal {
  std::vector<Int> diag;  // balanced entries mod p^certified
  long certified = 0;
  long loss = 0;
};
PadicDiagonal diagonalize_mod_pN(const std::vector<std::vector<Int>>& s,
                                 const Int& p, long N);

}  // namespace witt
