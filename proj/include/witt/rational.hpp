#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

namespace witt {

using Int = mpz_class;
using Rat = mpq_class;

// p-adic valuation of nonzero a; throws std::invalid_argument on a = 0.
long valuation(const Int& a, const Int& p);
long valuation(const Rat& a, const Int& p);

Int pow_int(const Int& base, unsigned long e);

bool is_prime(const Int& n);

// Prime factorization of |n| with primes ascending; n must be nonzero.
// Trial division below 10^5, then Pollard-Brent rho (deterministic seeds).
std::vector<std::pair<Int, int>> factor_integer(const Int& n);

// sign(n) * product of primes dividing n to an odd power; 0 maps to 0.
Int squarefree_part(const Int& n);
// Square-class representative num*den of a nonzero rational, made squarefree.
Int squarefree_part(const Rat& q);

bool is_square(const Int& n);
bool is_square(const Rat& q);

// Legendre symbol (a|p) for odd prime p not dividing a.
int legendre(const Int& a, const Int& p);

// Floor of sqrt(n); requires n >= 0.
Int isqrt(const Int& n);

// Inverse of a modulo m; throws std::invalid_argument if gcd(a, m) != 1.
Int mod_inverse(const Int& a, const Int& m);

// base^exp mod m, exp >= 0.
Int mod_pow(const Int& base, const Int& exp, const Int& m);

// Representative of a mod m in (-m/2, m/2], m > 0.
Int balanced_mod(const Int& a, const Int& m);

// Some rational s > 0 with lo < s^2 < hi; requires 0 <= lo < hi.
Rat rational_with_square_between(const Rat& lo, const Rat& hi);

// Parses "n" or "n/d" with d > 0 after canonicalization; throws on junk.
Rat rat_from_string(const std::string& s);
std::string rat_to_string(const Rat& q);

}  // namespace witt
