#include "witt/rational.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace witt {

long valuation(const Int& a, const Int& p) {
  if (a == 0) throw std::invalid_argument("valuation of zero");
  Int rest = a;
  long v = 0;
  while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
    rest /= p;
    ++v;
  }
  return v;
}

long valuation(const Rat& a, const Int& p) {
  if (a == 0) throw std::invalid_argument("valuation of zero");
  return valuation(Int(a.get_num()), p) - valuation(Int(a.get_den()), p);
}

Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

bool is_prime(const Int& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

namespace {

// Brent's cycle variant of Pollard rho; n odd composite, > 1.
Int pollard_brent(const Int& n) {
  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(0xb5297a4dUL);
  while (true) {
    Int y = rng.get_z_range(n - 3) + 1;
    Int c = rng.get_z_range(n - 2) + 1;
    Int g = 1, r = 1, q = 1, x, ys;
    while (g == 1) {
      x = y;
      for (Int i = 0; i < r; ++i) y = (y * y + c) % n;
      Int k = 0;
      while (k < r && g == 1) {
        ys = y;
        Int block = r - k;
        if (block > 128) block = 128;
        for (Int i = 0; i < block; ++i) {
          y = (y * y + c) % n;
          q = q * abs(x - y) % n;
        }
        g = gcd(q, n);
        k += block;
      }
      r *= 2;
    }
    if (g == n) {
      // Backtrack one step at a time from the last saved point.
      do {
        ys = (ys * ys + c) % n;
        g = gcd(abs(x - ys), n);
      } while (g == 1);
    }
    if (g != n) return g;
    // Whole cycle collapsed; retry with fresh parameters.
  }
}

void factor_into(const Int& n, std::map<Int, int>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  Int d = pollard_brent(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::vector<std::pair<Int, int>> factor_integer(const Int& n) {
  if (n == 0) throw std::invalid_argument("factor_integer(0)");
  std::map<Int, int> acc;
  Int rest = abs(n);
  for (Int p = 2; p < 100000 && p * p <= rest; p == 2 ? p = 3 : p += 2) {
    while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
      rest /= p;
      ++acc[p];
    }
  }
  if (rest > 1) {
    if (is_prime(rest))
      ++acc[rest];
    else
      factor_into(rest, acc);
  }
  return {acc.begin(), acc.end()};
}

Int squarefree_part(const Int& n) {
  if (n == 0) return 0;
  Int r = n < 0 ? -1 : 1;
  for (const auto& [p, e] : factor_integer(n))
    if (e % 2) r *= p;
  return r;
}

Int squarefree_part(const Rat& q) {
  if (q == 0) throw std::invalid_argument("square class of zero");
  return squarefree_part(Int(q.get_num() * q.get_den()));
}

bool is_square(const Int& n) {
  return n >= 0 && mpz_perfect_square_p(n.get_mpz_t());
}

bool is_square(const Rat& q) {
  return is_square(Int(q.get_num())) && is_square(Int(q.get_den()));
}

int legendre(const Int& a, const Int& p) {
  int s = mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
  if (s == 0) throw std::invalid_argument("legendre: p divides a");
  return s;
}

Int isqrt(const Int& n) {
  if (n < 0) throw std::invalid_argument("isqrt of negative");
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

Int mod_inverse(const Int& a, const Int& m) {
  Int r;
  if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()))
    throw std::invalid_argument("mod_inverse: not a unit");
  return r;
}

Int mod_pow(const Int& base, const Int& exp, const Int& m) {
  Int r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
  return r;
}

Int balanced_mod(const Int& a, const Int& m) {
  Int r = a % m;
  if (r < 0) r += m;
  if (2 * r > m) r -= m;
  return r;
}

Rat rational_with_square_between(const Rat& lo, const Rat& hi) {
  if (lo < 0 || lo >= hi)
    throw std::invalid_argument("rational_with_square_between: bad interval");
  // Search the dyadic grid k/2^m for a point of (sqrt(lo), sqrt(hi)); density
  // guarantees termination once 1/2^m is below the gap width.
  for (unsigned long m = 0;; ++m) {
    Int den = pow_int(2, 2 * m);  // 4^m
    Int k = isqrt(Int(hi.get_num() * den / hi.get_den()));
    Rat s(k, pow_int(2, m));
    s.canonicalize();
    while (k > 0 && s * s >= hi) {
      --k;
      s = Rat(k, pow_int(2, m));
      s.canonicalize();
    }
    if (k > 0 && s * s > lo) return s;
  }
}

Rat rat_from_string(const std::string& s) {
  Rat q;
  if (s.empty() || q.set_str(s, 10) != 0)
    throw std::invalid_argument("malformed rational: '" + s + "'");
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

std::string rat_to_string(const Rat& q) { return q.get_str(); }

}  // namespace witt
