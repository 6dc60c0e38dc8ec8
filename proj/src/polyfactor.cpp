#include "witt/polyfactor.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "witt/zmodpoly.hpp"

namespace witt {

PolyQ Factorization::expand() const {
  PolyQ r(content);
  for (const auto& [h, m] : factors)
    for (int i = 0; i < m; ++i) r = r * h;
  return r;
}

int Factorization::multiplicity(const PolyQ& h) const {
  for (const auto& [g, m] : factors)
    if (g == h) return m;
  return 0;
}

namespace {

// Yun's squarefree decomposition (von zur Gathen & Gerhard, Alg. 14.21):
// monic pairwise coprime squarefree parts a_i with input = lc * prod a_i^i.
std::vector<std::pair<PolyQ, int>> yun(const PolyQ& g) {
  std::vector<std::pair<PolyQ, int>> out;
  PolyQ f = g.monic();
  if (f.degree() == 0) return out;
  PolyQ u = gcd_monic(f, f.derivative());
  PolyQ b = quo(f, u);
  PolyQ c = quo(f.derivative(), u);
  PolyQ d = c - b.derivative();
  int i = 1;
  while (b.degree() > 0) {
    PolyQ a = gcd_monic(b, d);
    if (a.degree() > 0) out.emplace_back(a, i);
    b = quo(b, a);
    c = quo(d, a);
    d = c - b.derivative();
    ++i;
  }
  return out;
}

Int next_prime(const Int& n) {
  Int r;
  mpz_nextprime(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

bool next_combination(std::vector<size_t>& c, size_t n) {
  size_t k = c.size();
  for (size_t i = k; i-- > 0;) {
    if (c[i] + (k - i) < n) {
      ++c[i];
      for (size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Zassenhaus on a monic squarefree integer polynomial: factor mod a good
// prime, Hensel-lift past the Mignotte bound, recombine subsets ascending by
// cardinality. Returns monic integer factors.
std::vector<PolyQ> factor_monic_squarefree_int(const PolyQ& g) {
  int d = g.degree();
  if (d <= 1) return {g};
  std::vector<Int> gc;
  gc.reserve(d + 1);
  for (const auto& c : g.coeffs()) gc.emplace_back(c.get_num());

  // Monic input: any prime keeping g squarefree works.
  Int p = 2;
  while (true) {
    p = next_prime(p);
    ZPoly gp = zp_reduce(gc, p);
    ZPoly der = zp_derivative(gp, p);
    if (!der.empty() && zp_deg(zp_gcd(gp, der, p)) == 0) break;
  }

  std::vector<ZPoly> basis;
  for (const auto& [h, m] : zp_factor(zp_reduce(gc, p), p)) basis.push_back(h);
  if (basis.size() == 1) return {g};

  // Mignotte: coefficients of any monic factor are bounded by 2^d ||g||_2.
  Int n2 = 0;
  for (const auto& x : gc) n2 += x * x;
  Int bound = (Int(1) << d) * (isqrt(n2) + 1);
  unsigned long prec = 1;
  Int pN = p;
  while (pN < 2 * bound + 1) {
    pN *= p;
    ++prec;
  }
  std::vector<ZPoly> pool = hensel_lift(gc, basis, p, prec);

  std::vector<PolyQ> out;
  PolyQ rest = g;
  size_t s = 1;
  while (2 * s <= pool.size()) {
    std::vector<size_t> comb(s);
    std::iota(comb.begin(), comb.end(), size_t{0});
    bool found = false;
    do {
      ZPoly prod{Int(1)};
      for (size_t i : comb) prod = zp_mul(prod, pool[i], pN);
      PolyQ cand = zp_to_polyq_balanced(prod, pN);
      if (divides(cand, rest)) {
        out.push_back(cand);
        rest = quo(rest, cand);
        for (size_t i = comb.size(); i-- > 0;)
          pool.erase(pool.begin() + comb[i]);
        found = true;
        break;
      }
    } while (next_combination(comb, pool.size()));
    if (!found) ++s;
  }
  if (!rest.is_zero() && rest.degree() > 0) out.push_back(rest);
  return out;
}

// Monic squarefree rational input: clear denominators, then pull the leading
// coefficient into the variable (u = lc * t) so the integer factoring core
// only ever sees monic inputs.
std::vector<PolyQ> factor_squarefree_rational(const PolyQ& s) {
  PolyQ f = primitive_part(s);
  int d = f.degree();
  Int lc(f.lc().get_num());
  PolyQ g = f;
  if (lc != 1) {
    // G(u) = lc^(d-1) f(u/lc), monic with integer coefficients.
    std::vector<Rat> trans(d + 1);
    trans[d] = 1;
    for (int i = 0; i < d; ++i)
      trans[i] = f.coeff(i) * Rat(pow_int(lc, d - 1 - i));
    g = PolyQ(std::move(trans));
  }
  std::vector<PolyQ> out;
  for (const PolyQ& h : factor_monic_squarefree_int(g)) {
    if (lc == 1) {
      out.push_back(h.monic());
      continue;
    }
    // Map back: roots were scaled by lc, so substitute lc*t and re-monicize.
    out.push_back(compose(h, Rat(lc) * PolyQ::t()).monic());
  }
  return out;
}

bool poly_less(const PolyQ& a, const PolyQ& b) {
  if (a.is_zero() != b.is_zero()) return a.is_zero();
  if (a.is_zero()) return false;
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (int i = a.degree(); i >= 0; --i)
    if (a.coeff(i) != b.coeff(i)) return a.coeff(i) < b.coeff(i);
  return false;
}

}  // namespace

Factorization factor_q(const PolyQ& f) {
  if (f.is_zero()) throw std::invalid_argument("factor_q of zero");
  Factorization r;
  r.content = f.lc();
  if (f.degree() == 0) {
    r.content = f.coeff(0);
    return r;
  }
  PolyQ g = normalize_alexander(f);
  int tpow = f.degree() - g.degree();
  if (tpow > 0) r.factors.emplace_back(PolyQ::t(), tpow);
  if (g.degree() > 0)
    for (const auto& [part, mult] : yun(g))
      for (const auto& h : factor_squarefree_rational(part))
        r.factors.emplace_back(h, mult);
  std::sort(r.factors.begin(), r.factors.end(),
            [](const auto& a, const auto& b) {
              return poly_less(a.first, b.first);
            });
  return r;
}

namespace {

// Monic reversal h(0)^(-1) t^deg h(1/t); an involution on monic polynomials
// with nonzero constant term.
PolyQ monic_reversal(const PolyQ& h) { return reverse_bar(h).monic(); }

}  // namespace

bool is_ffbar(const PolyQ& f) {
  if (f.is_zero() || f.coeff(0) == 0)
    throw std::invalid_argument("is_ffbar needs F(0) != 0");
  Factorization fac = factor_q(f);
  Rat scalar = fac.content;
  std::set<std::vector<Rat>> done;
  for (const auto& [h, m] : fac.factors) {
    if (done.count(h.coeffs())) continue;
    done.insert(h.coeffs());
    PolyQ hstar = monic_reversal(h);
    if (hstar == h) {
      // Symmetric factor: must pair with itself, h(0) = ±1.
      if (m % 2) return false;
      if ((m / 2) % 2) scalar *= h.coeff(0);
    } else {
      if (fac.multiplicity(hstar) != m) return false;
      done.insert(hstar.coeffs());
      if (m % 2) scalar *= h.coeff(0);
    }
  }
  return is_square(scalar);
}

bool fm_equivalent(const PolyQ& p, const PolyQ& q) {
  if (p.is_zero() || p.coeff(0) == 0 || q.is_zero() || q.coeff(0) == 0)
    throw std::invalid_argument("fm_equivalent needs nonzero constant terms");
  Factorization fp = factor_q(p), fq = factor_q(q);
  // Multiplicity difference per monic irreducible factor.
  std::map<std::vector<Rat>, std::pair<PolyQ, int>> diff;
  for (const auto& [h, m] : fp.factors) diff[h.coeffs()] = {h, m};
  for (const auto& [h, m] : fq.factors) {
    auto it = diff.find(h.coeffs());
    if (it == diff.end())
      diff[h.coeffs()] = {h, -m};
    else
      it->second.second -= m;
  }
  Rat scalar = fp.content * fq.content;
  std::set<std::vector<Rat>> done;
  for (const auto& [key, entry] : diff) {
    const auto& [h, d] = entry;
    if (done.count(key)) continue;
    done.insert(key);
    PolyQ hstar = monic_reversal(h);
    if (hstar == h) {
      if (d % 2) return false;
      if ((d / 2) % 2) scalar *= h.coeff(0);
    } else {
      auto it = diff.find(hstar.coeffs());
      int dstar = it == diff.end() ? 0 : it->second.second;
      if (dstar != d) return false;
      done.insert(hstar.coeffs());
      if (d % 2) scalar *= h.coeff(0);
    }
  }
  return is_square(scalar);
}

}  // namespace witt
