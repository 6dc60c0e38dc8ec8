#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "witt/matrix.hpp"
#include "witt/poly.hpp"
#include "witt/rational.hpp"

namespace witt {

// Raised when an invariant is well defined only under a hypothesis the
// input does not establish (e.g. Arf of a link not known to be proper).
struct inapplicable_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Square rational matrix considered up to S-equivalence.  Admissible means
// the normalized Alexander polynomial t^-k det(A - t A^T) is nonzero; the
// degenerate ops below state which of them require admissibility.
class SeifertMatrix {
 public:
  explicit SeifertMatrix(QMat a);  // throws std::invalid_argument unless square

  const QMat& matrix() const { return a_; }
  std::size_t size() const { return a_.rows(); }

  // Normalized Alexander polynomial: det(A - t A^T) with the maximal power
  // of t divided out, so the constant term is nonzero unless the
  // determinant vanishes identically.  Computed once and cached.
  const PolyQ& alexander() const;
  bool admissible() const { return !alexander().is_zero(); }

 private:
  QMat a_;
  mutable std::optional<PolyQ> delta_;
};

PolyQ alexander(const SeifertMatrix& a);

// Which bordered enlargement to perform: `column` glues
//   [[A, 0, u], [0, 0, 0], [0, 1, 0]]
// with u the border column, `row` glues
//   [[A, 0, 0], [0, 0, 1], [v, 0, 0]]
// with v the border row.  Both leave the normalized Alexander polynomial
// unchanged.
enum class SEnlargeKind { column, row };

// border.size() must equal a.size().
SeifertMatrix s_enlarge(const SeifertMatrix& a, const std::vector<Rat>& border,
                        SEnlargeKind kind);

// Strips a singular matrix down to an S-equivalent nonsingular one over Q
// using determinant +-1 congruences, so the normalized Alexander polynomial
// is preserved coefficient for coefficient whenever its degree is positive
// (a constant Alexander polynomial collapses to the empty matrix, whose
// polynomial is 1).  Nonsingular input is returned unchanged.  Requires
// Delta(-1) != 0, equivalently det(A + A^T) != 0.
SeifertMatrix make_nonsingular(const SeifertMatrix& a);

// Point on the unit circle, either w = -1 or the tangent half-angle value
//   w = ((1 - s^2) + 2si) / (1 + s^2)
// for rational s != 0.  The excluded s = 0 is w = 1, where the hermitian
// pencil below vanishes identically.
class CirclePoint {
 public:
  static CirclePoint minus_one();
  static CirclePoint half_angle(Rat s);  // throws std::domain_error on s = 0

  bool is_minus_one() const { return minus_one_; }
  const Rat& s() const;  // throws std::logic_error when is_minus_one()

  // w + conj(w): -2 for w = -1, else 2(1 - s^2)/(1 + s^2).  Orders sample
  // points along the upper half circle.
  Rat real_part_doubled() const;

 private:
  CirclePoint() = default;
  bool minus_one_ = false;
  Rat s_;
};

struct SigNull {
  long signature = 0;
  std::size_t nullity = 0;
};

// Signature and nullity of (1 - w) A + (1 - conj w) A^T, computed exactly.
// The nullity is positive exactly at the roots of the Alexander polynomial
// on the circle.
SigNull lt_signature(const SeifertMatrix& a, const CirclePoint& w);

struct SignatureSample {
  CirclePoint omega;
  long signature = 0;
  std::size_t nullity = 0;
};

// One sample strictly inside every open arc cut out of the unit circle by
// the roots of the Alexander polynomial, plus w = -1 itself whenever it is
// not a root.  Ordered by increasing real part.  Requires admissibility.
std::vector<SignatureSample> collect_signature_samples(const SeifertMatrix& a);

// True iff every sampled signature is zero; since the signature is constant
// on each arc, this decides vanishing of the whole signature function away
// from the jump points.
bool signature_function_vanishes(const SeifertMatrix& a);

// Number of link components: 1 + dim ker(A - A^T).
std::size_t components(const SeifertMatrix& a);

// -Delta'(1), the linking number of the two components.  Throws unless
// components(a) == 2.
Rat linking_number(const SeifertMatrix& a);

// Arf invariant of the mod-2 quadratic form q(x) = x^T A x on a complement
// of the radical of the symmetrized form.  Requires integer entries and a
// proper link: properness is automatic for knots, derived from an even
// linking number for two components, and must be asserted by the caller
// beyond that (inapplicable_error otherwise, likewise when q fails to
// vanish on the radical, which refutes the properness assumption).
int arf(const SeifertMatrix& a,
        std::optional<bool> asserted_proper = std::nullopt);

}  // namespace witt
