#pragma once

#include <string>
#include <utility>
#include <vector>

#include "witt/rational.hpp"

namespace witt {

// Dense univariate polynomial over Q in the variable t. The coefficient
// vector is always trimmed, so the zero polynomial is the empty vector and
// degree() is total: it throws instead of returning a sentinel.
class PolyQ {
 public:
  PolyQ() = default;
  explicit PolyQ(const Rat& constant);
  explicit PolyQ(std::vector<Rat> coeffs);  // coeffs[i] multiplies t^i

  static PolyQ t();

  bool is_zero() const { return c_.empty(); }
  int degree() const;  // throws std::logic_error on the zero polynomial
  Rat coeff(int i) const;
  Rat lc() const;  // leading coefficient; throws on zero
  const std::vector<Rat>& coeffs() const { return c_; }

  PolyQ operator-() const;
  PolyQ& operator+=(const PolyQ& o);
  PolyQ& operator-=(const PolyQ& o);
  PolyQ& operator*=(const PolyQ& o);
  PolyQ& operator*=(const Rat& s);

  bool operator==(const PolyQ& o) const = default;

  Rat eval(const Rat& x) const;
  PolyQ derivative() const;
  PolyQ monic() const;          // throws on zero
  PolyQ shifted(int k) const;   // multiply by t^k, k >= 0
  PolyQ reversed() const;       // coefficient reversal t^deg * P(1/t)

  // True when every coefficient is an integer.
  bool is_integral() const;

 private:
  void trim();
  std::vector<Rat> c_;
};

PolyQ operator+(PolyQ a, const PolyQ& b);
PolyQ operator-(PolyQ a, const PolyQ& b);
PolyQ operator*(const PolyQ& a, const PolyQ& b);
PolyQ operator*(const Rat& s, PolyQ a);

// Quotient and remainder; divisor must be nonzero.
std::pair<PolyQ, PolyQ> divrem(const PolyQ& a, const PolyQ& b);
PolyQ quo(const PolyQ& a, const PolyQ& b);
PolyQ rem(const PolyQ& a, const PolyQ& b);
bool divides(const PolyQ& d, const PolyQ& a);

// Monic gcd (Euclid over Q); gcd(0, 0) = 0.
PolyQ gcd_monic(PolyQ a, PolyQ b);

// P(Q(t)) by Horner.
PolyQ compose(const PolyQ& p, const PolyQ& q);

// content(P) in Q^* with P = content * primitive_part(P), where the
// primitive part has coprime integer coefficients and positive lc.
Rat content(const PolyQ& p);
PolyQ primitive_part(const PolyQ& p);

// t^deg * F(1/t): plain coefficient reversal; rejects the zero polynomial.
PolyQ reverse_bar(const PolyQ& f);

// Divides out the maximal power of t; the zero polynomial maps to itself and
// coefficients are never rescaled.
PolyQ normalize_alexander(const PolyQ& raw);

// Classification against the coefficient reversal; requires p(0) != 0, so
// callers normalize first.
enum class Symmetry { palindromic, antipalindromic, none };
Symmetry symmetry_type(const PolyQ& p);

// Resultant via the Sylvester matrix; both arguments nonzero.
Rat resultant(const PolyQ& a, const PolyQ& b);
// (-1)^(d(d-1)/2) Res(P, P') / lc(P), d = deg P >= 1.
Rat discriminant(const PolyQ& p);

// For palindromic P of even degree 2d: the unique S of degree d with
// P(t) = t^d S(t + 1/t), built from the Chebyshev-like basis
// C_0 = 2, C_1 = x, C_k = x C_{k-1} - C_{k-2} (so t^k + t^-k = C_k(t + 1/t)).
PolyQ trace_poly(const PolyQ& p);

// "2*t^3 - t/2 + 1" style; parse accepts what print produces.
std::string poly_to_string(const PolyQ& p, const std::string& var = "t");
PolyQ poly_from_string(const std::string& s, const std::string& var = "t");

}  // namespace witt
