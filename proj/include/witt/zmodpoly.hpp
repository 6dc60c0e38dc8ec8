#pragma once

#include <tuple>
#include <utility>
#include <vector>

#include "witt/poly.hpp"
#include "witt/rational.hpp"

namespace witt {

// Dense polynomials over Z/m: coefficients normalized to [0, m) and trimmed.
// Shared plumbing for the rational and p-adic factorizers; the zero
// polynomial has degree -1 here (internal convention, unlike PolyQ).
using ZPoly = std::vector<Int>;

int zp_deg(const ZPoly& f);
bool zp_is_zero(const ZPoly& f);
ZPoly zp_trim(ZPoly f);
ZPoly zp_reduce(const ZPoly& f, const Int& m);

// Reduction of a rational polynomial; denominators must be units mod m.
ZPoly zp_from(const PolyQ& f, const Int& m);
// Plain lift of the normalized coefficients.
PolyQ zp_to_polyq(const ZPoly& f);
// Lift with balanced coefficients in (-m/2, m/2].
PolyQ zp_to_polyq_balanced(const ZPoly& f, const Int& m);

ZPoly zp_add(const ZPoly& a, const ZPoly& b, const Int& m);
ZPoly zp_sub(const ZPoly& a, const ZPoly& b, const Int& m);
ZPoly zp_mul(const ZPoly& a, const ZPoly& b, const Int& m);
ZPoly zp_scale(const ZPoly& a, const Int& c, const Int& m);
ZPoly zp_derivative(const ZPoly& a, const Int& m);

// Requires lc(b) a unit mod m.
std::pair<ZPoly, ZPoly> zp_divrem(const ZPoly& a, const ZPoly& b, const Int& m);
ZPoly zp_monic(const ZPoly& a, const Int& m);

// base^e mod (f, m); e >= 0, lc(f) a unit.
ZPoly zp_powmod(const ZPoly& base, const Int& e, const ZPoly& f, const Int& m);

// Monic gcd over the field Z/p.
ZPoly zp_gcd(ZPoly a, ZPoly b, const Int& p);
// (g, u, v) with u*a + v*b = g, g the monic gcd, over Z/p.
std::tuple<ZPoly, ZPoly, ZPoly> zp_ext_gcd(const ZPoly& a, const ZPoly& b,
                                           const Int& p);

// Squarefree decomposition of monic f over Z/p: pairwise coprime monic
// squarefree parts with multiplicities, product reconstructing f.
std::vector<std::pair<ZPoly, int>> zp_squarefree(const ZPoly& f, const Int& p);

// Distinct-degree split of monic squarefree f: (product of all irreducible
// factors of degree d, d) pairs, d ascending.
std::vector<std::pair<ZPoly, int>> zp_ddf(const ZPoly& f, const Int& p);

// Cantor-Zassenhaus equal-degree split of a ddf part into its monic
// irreducible factors of degree d (deterministic candidate enumeration).
std::vector<ZPoly> zp_edf(const ZPoly& f, int d, const Int& p);

// Full factorization of f over Z/p (any unit lc): monic irreducible factors
// with multiplicities, sorted; the unit is implicit in the caller's lc.
std::vector<std::pair<ZPoly, int>> zp_factor(const ZPoly& f, const Int& p);

// Hensel lifting: f_exact a monic integer polynomial, factors monic and
// pairwise coprime mod p with product ≡ f mod p. Returns monic lifts with
// product ≡ f mod p^N, in the input order.
std::vector<ZPoly> hensel_lift(const std::vector<Int>& f_exact,
                               const std::vector<ZPoly>& factors, const Int& p,
                               unsigned long N);

}  // namespace witt
