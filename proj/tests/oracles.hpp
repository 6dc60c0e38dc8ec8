#pragma once

// Independent reference routes used to cross-check the library: naive
// cofactor determinants and a Rabin-style irreducibility test. Kept
// deliberately simple and separate from the production algorithms.

#include <vector>

#include "witt/matrix.hpp"
#include "witt/poly.hpp"
#include "witt/rational.hpp"
#include "witt/zmodpoly.hpp"

namespace witt::oracle {

inline Rat cofactor_det(const std::vector<std::vector<Rat>>& m) {
  size_t n = m.size();
  if (n == 0) return Rat(1);
  if (n == 1) return m[0][0];
  Rat acc = 0;
  for (size_t j = 0; j < n; ++j) {
    if (m[0][j] == 0) continue;
    std::vector<std::vector<Rat>> minor;
    for (size_t i = 1; i < n; ++i) {
      std::vector<Rat> row;
      for (size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(std::move(row));
    }
    Rat term = m[0][j] * cofactor_det(minor);
    acc += j % 2 ? -term : term;
  }
  return acc;
}

inline PolyQ cofactor_det_poly(const std::vector<std::vector<PolyQ>>& m) {
  size_t n = m.size();
  if (n == 0) return PolyQ(Rat(1));
  if (n == 1) return m[0][0];
  PolyQ acc;
  for (size_t j = 0; j < n; ++j) {
    if (m[0][j].is_zero()) continue;
    std::vector<std::vector<PolyQ>> minor;
    for (size_t i = 1; i < n; ++i) {
      std::vector<PolyQ> row;
      for (size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(std::move(row));
    }
    PolyQ term = m[0][j] * cofactor_det_poly(minor);
    if (j % 2)
      acc -= term;
    else
      acc += term;
  }
  return acc;
}

// Rabin: monic h of degree d is irreducible over F_p iff h | x^(p^d) - x
// and gcd(h, x^(p^(d/l)) - x) = 1 for every prime l dividing d.
inline bool is_irreducible_mod_p(const ZPoly& h, const Int& p) {
  int d = zp_deg(h);
  if (d <= 0) return false;
  const ZPoly x{Int(0), Int(1)};
  ZPoly xq = zp_powmod(x, pow_int(p, d), h, p);
  if (!zp_is_zero(zp_sub(xq, zp_divrem(x, h, p).second, p))) return false;
  for (int l = 2; l <= d; ++l) {
    if (d % l != 0 || !is_prime(Int(l))) continue;
    ZPoly xr = zp_powmod(x, pow_int(p, d / l), h, p);
    ZPoly g = zp_gcd(zp_sub(xr, x, p), h, p);
    if (zp_deg(g) != 0) return false;
  }
  return true;
}

}  // namespace witt::oracle
