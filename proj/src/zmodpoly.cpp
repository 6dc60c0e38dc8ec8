#include "witt/zmodpoly.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace witt {

int zp_deg(const ZPoly& f) { return static_cast<int>(f.size()) - 1; }
bool zp_is_zero(const ZPoly& f) { return f.empty(); }

ZPoly zp_trim(ZPoly f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
  return f;
}

ZPoly zp_reduce(const ZPoly& f, const Int& m) {
  ZPoly r = f;
  for (auto& x : r) {
    x %= m;
    if (x < 0) x += m;
  }
  return zp_trim(std::move(r));
}

ZPoly zp_from(const PolyQ& f, const Int& m) {
  ZPoly r;
  r.reserve(f.coeffs().size());
  for (const auto& c : f.coeffs()) {
    Int den(c.get_den());
    Int num(c.get_num());
    r.push_back(num * mod_inverse(den, m) % m);
  }
  return zp_reduce(std::move(r), m);
}

PolyQ zp_to_polyq(const ZPoly& f) {
  std::vector<Rat> c(f.begin(), f.end());
  return PolyQ(std::move(c));
}

PolyQ zp_to_polyq_balanced(const ZPoly& f, const Int& m) {
  std::vector<Rat> c;
  c.reserve(f.size());
  for (const auto& x : f) c.emplace_back(balanced_mod(x, m));
  return PolyQ(std::move(c));
}

ZPoly zp_add(const ZPoly& a, const ZPoly& b, const Int& m) {
  ZPoly r = a;
  if (r.size() < b.size()) r.resize(b.size());
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return zp_reduce(std::move(r), m);
}

ZPoly zp_sub(const ZPoly& a, const ZPoly& b, const Int& m) {
  ZPoly r = a;
  if (r.size() < b.size()) r.resize(b.size());
  for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return zp_reduce(std::move(r), m);
}

ZPoly zp_mul(const ZPoly& a, const ZPoly& b, const Int& m) {
  if (a.empty() || b.empty()) return {};
  ZPoly r(a.size() + b.size() - 1, Int(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return zp_reduce(std::move(r), m);
}

ZPoly zp_scale(const ZPoly& a, const Int& c, const Int& m) {
  ZPoly r = a;
  for (auto& x : r) x *= c;
  return zp_reduce(std::move(r), m);
}

ZPoly zp_derivative(const ZPoly& a, const Int& m) {
  if (a.size() <= 1) return {};
  ZPoly r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = Int(i) * a[i];
  return zp_reduce(std::move(r), m);
}

std::pair<ZPoly, ZPoly> zp_divrem(const ZPoly& a, const ZPoly& b,
                                  const Int& m) {
  if (b.empty()) throw std::invalid_argument("zp_divrem by zero");
  Int inv = mod_inverse(b.back(), m);
  ZPoly r = zp_reduce(a, m);
  int db = zp_deg(b);
  if (zp_deg(r) < db) return {{}, r};
  ZPoly q(r.size() - db, Int(0));
  for (int i = zp_deg(r); i >= db; --i) {
    if (r[i] == 0) continue;
    Int f = r[i] * inv % m;
    q[i - db] = f;
    for (int j = 0; j <= db; ++j) {
      r[i - db + j] = (r[i - db + j] - f * b[j]) % m;
      if (r[i - db + j] < 0) r[i - db + j] += m;
    }
  }
  return {zp_trim(std::move(q)), zp_trim(std::move(r))};
}

ZPoly zp_monic(const ZPoly& a, const Int& m) {
  if (a.empty()) return a;
  return zp_scale(a, mod_inverse(a.back(), m), m);
}

ZPoly zp_powmod(const ZPoly& base, const Int& e, const ZPoly& f,
                const Int& m) {
  if (e < 0) throw std::invalid_argument("zp_powmod negative exponent");
  ZPoly result{Int(1)};
  ZPoly b = zp_divrem(base, f, m).second;
  Int ee = e;
  while (ee > 0) {
    if (mpz_odd_p(ee.get_mpz_t()))
      result = zp_divrem(zp_mul(result, b, m), f, m).second;
    b = zp_divrem(zp_mul(b, b, m), f, m).second;
    ee >>= 1;
  }
  return result;
}

ZPoly zp_gcd(ZPoly a, ZPoly b, const Int& p) {
  a = zp_reduce(a, p);
  b = zp_reduce(b, p);
  while (!b.empty()) {
    ZPoly r = zp_divrem(a, b, p).second;
    a = std::move(b);
    b = std::move(r);
  }
  return zp_monic(a, p);
}

std::tuple<ZPoly, ZPoly, ZPoly> zp_ext_gcd(const ZPoly& a, const ZPoly& b,
                                           const Int& p) {
  ZPoly r0 = zp_reduce(a, p), r1 = zp_reduce(b, p);
  ZPoly s0{Int(1)}, s1, t0, t1{Int(1)};
  while (!r1.empty()) {
    auto [q, r2] = zp_divrem(r0, r1, p);
    r0 = std::move(r1);
    r1 = std::move(r2);
    ZPoly s2 = zp_sub(s0, zp_mul(q, s1, p), p);
    s0 = std::move(s1);
    s1 = std::move(s2);
    ZPoly t2 = zp_sub(t0, zp_mul(q, t1, p), p);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.empty()) return {r0, s0, t0};
  Int inv = mod_inverse(r0.back(), p);
  return {zp_scale(r0, inv, p), zp_scale(s0, inv, p), zp_scale(t0, inv, p)};
}

namespace {

// Over the prime field, c^p = c, so the p-th root of g(t) = h(t^p) is h with
// the same coefficients.
ZPoly pth_root(const ZPoly& g, const Int& p) {
  unsigned long ip = p.get_ui();
  ZPoly r;
  for (size_t i = 0; i < g.size(); ++i) {
    if (i % ip == 0)
      r.push_back(g[i]);
    else if (g[i] != 0)
      throw std::logic_error("pth_root: input is not a p-th power");
  }
  return zp_trim(std::move(r));
}

void squarefree_rec(const ZPoly& f, int e, const Int& p,
                    std::vector<std::pair<ZPoly, int>>& out) {
  if (zp_deg(f) <= 0) return;
  ZPoly fp = zp_derivative(f, p);
  if (fp.empty()) {
    squarefree_rec(pth_root(f, p), e * static_cast<int>(p.get_ui()), p, out);
    return;
  }
  ZPoly g = zp_gcd(f, fp, p);
  ZPoly w = zp_divrem(f, g, p).first;
  int i = 1;
  while (zp_deg(w) > 0) {
    ZPoly y = zp_gcd(w, g, p);
    ZPoly z = zp_divrem(w, y, p).first;
    if (zp_deg(z) > 0) out.emplace_back(z, i * e);
    w = std::move(y);
    g = zp_divrem(g, w, p).first;
    ++i;
  }
  if (zp_deg(g) > 0)
    squarefree_rec(pth_root(g, p), e * static_cast<int>(p.get_ui()), p, out);
}

// Deterministic candidate stream for Cantor-Zassenhaus: the base-p digits of
// the counter give the coefficients, so every residue polynomial shows up.
ZPoly edf_candidate(unsigned long j, const Int& p) {
  ZPoly r;
  Int rest = j;
  while (rest > 0) {
    r.push_back(rest % p);
    rest /= p;
  }
  return zp_trim(std::move(r));
}

}  // namespace

std::vector<std::pair<ZPoly, int>> zp_squarefree(const ZPoly& f,
                                                 const Int& p) {
  ZPoly g = zp_reduce(f, p);
  if (g.empty() || g.back() != 1)
    throw std::invalid_argument("zp_squarefree needs a monic input");
  std::vector<std::pair<ZPoly, int>> out;
  squarefree_rec(g, 1, p, out);
  return out;
}

std::vector<std::pair<ZPoly, int>> zp_ddf(const ZPoly& f, const Int& p) {
  ZPoly w = zp_reduce(f, p);
  if (w.empty() || w.back() != 1)
    throw std::invalid_argument("zp_ddf needs a monic input");
  const ZPoly x{Int(0), Int(1)};
  std::vector<std::pair<ZPoly, int>> res;
  ZPoly v = zp_divrem(x, w, p).second;
  int d = 0;
  while (zp_deg(w) >= 2 * (d + 1)) {
    ++d;
    v = zp_powmod(v, p, w, p);
    ZPoly g = zp_gcd(zp_sub(v, x, p), w, p);
    if (zp_deg(g) > 0) {
      res.emplace_back(g, d);
      w = zp_divrem(w, g, p).first;
      v = zp_divrem(v, w, p).second;
    }
  }
  if (zp_deg(w) > 0) res.emplace_back(w, zp_deg(w));
  return res;
}

std::vector<ZPoly> zp_edf(const ZPoly& f, int d, const Int& p) {
  if (zp_deg(f) == d) return {zp_monic(f, p)};
  if (zp_deg(f) % d != 0) throw std::invalid_argument("zp_edf degree mismatch");
  for (unsigned long j = 1;; ++j) {
    ZPoly r = edf_candidate(j, p);
    if (r.empty()) continue;
    ZPoly w;
    if (p == 2) {
      // Trace map over F_{2^d}: gcd with sum of Frobenius iterates splits.
      ZPoly cur = zp_divrem(r, f, p).second;
      ZPoly tr;
      for (int i = 0; i < d; ++i) {
        tr = zp_add(tr, cur, p);
        cur = zp_divrem(zp_mul(cur, cur, p), f, p).second;
      }
      w = tr;
    } else {
      Int e = (pow_int(p, d) - 1) / 2;
      w = zp_sub(zp_powmod(r, e, f, p), ZPoly{Int(1)}, p);
    }
    ZPoly g = zp_gcd(w, f, p);
    if (zp_deg(g) > 0 && zp_deg(g) < zp_deg(f)) {
      auto left = zp_edf(g, d, p);
      auto right = zp_edf(zp_divrem(f, g, p).first, d, p);
      left.insert(left.end(), right.begin(), right.end());
      return left;
    }
  }
}

std::vector<std::pair<ZPoly, int>> zp_factor(const ZPoly& f, const Int& p) {
  ZPoly g = zp_reduce(f, p);
  if (g.empty()) throw std::invalid_argument("zp_factor of zero");
  g = zp_monic(g, p);
  std::vector<std::pair<ZPoly, int>> out;
  if (zp_deg(g) == 0) return out;
  for (const auto& [part, mult] : zp_squarefree(g, p))
    for (const auto& [prod, d] : zp_ddf(part, p))
      for (const auto& irr : zp_edf(prod, d, p)) out.emplace_back(irr, mult);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    for (size_t i = a.first.size(); i-- > 0;)
      if (a.first[i] != b.first[i]) return a.first[i] < b.first[i];
    return a.second < b.second;
  });
  return out;
}

namespace {

// One quadratic Hensel step (von zur Gathen & Gerhard, "Modern Computer
// Algebra", Algorithm 15.10), specialized to monic f, g, h.
void hensel_step(const ZPoly& f, ZPoly& g, ZPoly& h, ZPoly& s, ZPoly& t,
                 const Int& m) {
  Int m2 = m * m;
  ZPoly e = zp_sub(zp_reduce(f, m2), zp_mul(g, h, m2), m2);
  auto [q, r] = zp_divrem(zp_mul(s, e, m2), h, m2);
  ZPoly gn = zp_add(zp_add(g, zp_mul(t, e, m2), m2), zp_mul(q, g, m2), m2);
  ZPoly hn = zp_add(h, r, m2);
  ZPoly b = zp_sub(zp_add(zp_mul(s, gn, m2), zp_mul(t, hn, m2), m2),
                   ZPoly{Int(1)}, m2);
  auto [c, d] = zp_divrem(zp_mul(s, b, m2), hn, m2);
  ZPoly sn = zp_sub(s, d, m2);
  ZPoly tn =
      zp_sub(zp_sub(t, zp_mul(t, b, m2), m2), zp_mul(c, gn, m2), m2);
  if (zp_deg(gn) != zp_deg(g) || gn.back() != 1 || zp_deg(hn) != zp_deg(h) ||
      hn.back() != 1)
    throw std::logic_error("hensel_step lost monicity");
  g = std::move(gn);
  h = std::move(hn);
  s = std::move(sn);
  t = std::move(tn);
}

}  // namespace

std::vector<ZPoly> hensel_lift(const std::vector<Int>& f_exact,
                               const std::vector<ZPoly>& factors, const Int& p,
                               unsigned long N) {
  if (factors.empty()) throw std::invalid_argument("hensel_lift: no factors");
  Int pN = pow_int(p, N);
  if (factors.size() == 1) return {zp_reduce(f_exact, pN)};
  size_t mid = factors.size() / 2;
  ZPoly g{Int(1)}, h{Int(1)};
  for (size_t i = 0; i < mid; ++i) g = zp_mul(g, factors[i], p);
  for (size_t i = mid; i < factors.size(); ++i) h = zp_mul(h, factors[i], p);
  auto [gg, s, t] = zp_ext_gcd(g, h, p);
  if (zp_deg(gg) != 0)
    throw std::invalid_argument("hensel_lift: factors not coprime mod p");
  unsigned long k = 1;
  Int mk = p;
  while (k < N) {
    hensel_step(f_exact, g, h, s, t, mk);
    mk *= mk;
    k *= 2;
  }
  // g, h are exact integer representatives of the lifts mod p^k (k >= N);
  // recurse with them as the new exact inputs.
  auto left = hensel_lift(g, std::vector<ZPoly>(factors.begin(),
                                                factors.begin() + mid),
                          p, N);
  auto right = hensel_lift(h, std::vector<ZPoly>(factors.begin() + mid,
                                                 factors.end()),
                           p, N);
  left.insert(left.end(), right.begin(), right.end());
  return left;
}

}  // namespace witt
