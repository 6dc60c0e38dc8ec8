#include "witt/padic.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <tuple>

#include "witt/polyfactor.hpp"
#include "witt/zmodpoly.hpp"

namespace witt {

namespace {

Int pw(const Int& p, long e) { return pow_int(p, static_cast<unsigned long>(e)); }

long vint(const Int& a, const Int& p) {
  return a == 0 ? VAL_INF : valuation(a, p);
}

// Minimal coefficient valuation; VAL_INF for the zero polynomial.
long poly_min_val(const PolyQ& f, const Int& p) {
  long m = VAL_INF;
  for (const Rat& c : f.coeffs())
    if (c != 0) m = std::min(m, valuation(c, p));
  return m;
}

Int canon(const Int& a, const Int& m) {
  Int r = a % m;
  if (r < 0) r += m;
  return r;
}

// ceil(a / b) for b > 0, any sign of a.
long ceil_q(long a, long b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

// p-unit part of nonzero r. The valuation is valuation(r, p).
Rat unit_part(const Rat& r, const Int& p) {
  long a = valuation(r, p);
  Rat u = r;
  if (a > 0)
    u /= Rat(pw(p, a));
  else if (a < 0)
    u *= Rat(pw(p, -a));
  return u;
}

// Legendre symbol of a p-unit rational: (num|p)(den|p).
int leg_rat(const Rat& u, const Int& p) {
  Int nu = u.get_num(), de = u.get_den();
  return legendre(nu, p) * legendre(de, p);
}

// Odd unit rational mod 8, in {1, 3, 5, 7}.
Int mod8(const Rat& u) {
  Int nu = canon(u.get_num(), 8), de = canon(u.get_den(), 8);
  return canon(nu * mod_inverse(de, 8), 8);
}

// The standard 2-adic square-class characters of an odd unit u mod 8:
// eps = (u-1)/2 mod 2 and omega = (u^2-1)/8 mod 2.
int eps2(const Int& u8) { return mpz_class((u8 - 1) / 2 % 2).get_si(); }
int omega2(const Int& u8) { return mpz_class((u8 * u8 - 1) / 8 % 2).get_si(); }

}  // namespace

std::string Place::label() const {
  return is_real ? "R" : "Q_" + p.get_str();
}

std::string Place::key() const { return is_real ? "infinity" : p.get_str(); }

bool is_square_local(const Rat& r, const Place& v) {
  if (r == 0) throw std::invalid_argument("is_square_local: zero argument");
  if (v.is_real) return r > 0;
  const Int& p = v.p;
  if (valuation(r, p) % 2 != 0) return false;
  Rat u = unit_part(r, p);
  if (p == 2) return mod8(u) == 1;
  return leg_rat(u, p) == 1;
}

int hilbert(const Rat& a, const Rat& b, const Place& v) {
  if (a == 0 || b == 0) throw std::invalid_argument("hilbert: zero argument");
  if (v.is_real) return (a < 0 && b < 0) ? -1 : 1;
  const Int& p = v.p;
  long al = ((valuation(a, p) % 2) + 2) % 2;
  long be = ((valuation(b, p) % 2) + 2) % 2;
  Rat u = unit_part(a, p), w = unit_part(b, p);
  if (p == 2) {
    long ex = static_cast<long>(eps2(mod8(u))) * eps2(mod8(w)) +
              al * omega2(mod8(w)) + be * omega2(mod8(u));
    return ex % 2 == 0 ? 1 : -1;
  }
  int s = 1;
  if (al && be && (p % 4) == 3) s = -s;
  if (be && leg_rat(u, p) == -1) s = -s;
  if (al && leg_rat(w, p) == -1) s = -s;
  return s;
}

namespace {

// Square root mod an odd prime by Tonelli-Shanks; a must be a residue.
Int sqrt_mod_p(const Int& a0, const Int& p) {
  Int a = canon(a0, p);
  if (legendre(a, p) != 1)
    throw std::invalid_argument("sqrt_mod_pN: not a square unit");
  if (p % 4 == 3) return mod_pow(a, (p + 1) / 4, p);
  Int q = p - 1;
  long s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  Int z = 2;
  while (legendre(z, p) != -1) ++z;
  long m = s;
  Int c = mod_pow(z, q, p);
  Int t = mod_pow(a, q, p);
  Int r = mod_pow(a, (q + 1) / 2, p);
  while (t != 1) {
    long i = 0;
    Int t2 = t;
    while (t2 != 1) {
      t2 = t2 * t2 % p;
      ++i;
    }
    Int b = c;
    for (long j = 0; j < m - i - 1; ++j) b = b * b % p;
    m = i;
    c = b * b % p;
    t = t * c % p;
    r = r * b % p;
  }
  return r;
}

}  // namespace

Int sqrt_mod_pN(const Int& a, const Int& p, long N) {
  if (N < 1) throw std::invalid_argument("sqrt_mod_pN: N < 1");
  Int M = pw(p, N);
  Int am = canon(a, M);
  if (am % p == 0) throw std::invalid_argument("sqrt_mod_pN: not a unit");
  if (p == 2) {
    // Bit-fixing from x = 1: after step m, x^2 = a mod 2^(m+1). Returns the
    // root congruent to 1 mod 4 (the four roots are +-x, +-x + 2^(N-1)).
    if (N == 1) return Int(1);
    if (canon(am, 4) != 1)
      throw std::invalid_argument("sqrt_mod_pN: not a square unit");
    if (N == 2) return Int(1);
    if (canon(am, 8) != 1)
      throw std::invalid_argument("sqrt_mod_pN: not a square unit");
    Int x = 1;
    for (long m = 3; m < N; ++m) {
      Int d = (am - x * x) / pw(p, m);
      if (canon(d, 2) == 1) x += pw(p, m - 1);
    }
    return canon(x, M);
  }
  Int x = sqrt_mod_p(am, p);
  long k = 1;
  while (k < N) {
    long k2 = std::min(2 * k, N);
    Int mk = pw(p, k2);
    // Newton step for x^2 = a: x <- (x + a/x)/2 mod p^k2.
    Int xi = mod_inverse(x, mk);
    Int half = mod_inverse(Int(2), mk);
    x = canon(canon(x + am % mk * xi, mk) * half, mk);
    k = k2;
  }
  x = canon(x, M);
  Int other = M - x;
  return x <= other ? x : other;
}

std::vector<std::pair<long, long>> newton_polygon(const std::vector<long>& vals) {
  if (vals.size() < 2)
    throw std::invalid_argument("newton_polygon: need degree >= 1");
  if (vals.front() >= VAL_INF || vals.back() >= VAL_INF)
    throw std::invalid_argument("newton_polygon: endpoints must be nonzero");
  std::vector<std::pair<long, long>> h;
  for (long i = 0; i < static_cast<long>(vals.size()); ++i) {
    long y = vals[i];
    if (y >= VAL_INF) continue;
    while (h.size() >= 2) {
      auto [x1, y1] = h[h.size() - 2];
      auto [x2, y2] = h[h.size() - 1];
      // Drop the middle point when it is on or above the chord.
      if ((y2 - y1) * (i - x1) >= (y - y1) * (x2 - x1))
        h.pop_back();
      else
        break;
    }
    h.emplace_back(i, y);
  }
  return h;
}

std::string PadicPoly::str(const std::string& var) const {
  return poly_to_string(zp_to_polyq_balanced(c, pw(p, N)), var);
}

precision_error::precision_error(const std::string& what, long n)
    : std::runtime_error(what), attempted(n) {}

budget_error::budget_error(const std::string& what, unsigned long long n)
    : std::runtime_error(what), attempted(n) {}

namespace {

// ---------------------------------------------------------------------------
// factor_qp internals. All polynomials below are monic with p-integral
// coefficients; an App couples the canonical residue mod p^W with W.
// ---------------------------------------------------------------------------

struct SearchBudget {
  unsigned long long nodes = 0;
  static constexpr unsigned long long kMaxNodes = 1ull << 20;
  static constexpr std::size_t kMaxPopulation = std::size_t(1) << 15;
  void tick(unsigned long long k = 1) {
    nodes += k;
    if (nodes > kMaxNodes)
      throw budget_error("factor_qp: divisor search budget exhausted", nodes);
  }
};

// The true factor tracked by an approximant is congruent to c mod p^W.
struct App {
  ZPoly c;
  long W = 0;
};

// Internal retry signal: the working precision was too small. need = 0 asks
// the driver to double, otherwise it is an absolute request.
struct shortfall {
  long need = 0;
};

PolyQ lift_bal(const ZPoly& f, const Int& m) {
  return zp_to_polyq_balanced(f, m);
}

// Extended Euclid over Q: u*a + v*b = g with g the monic gcd.
std::tuple<PolyQ, PolyQ, PolyQ> poly_ext_gcd(PolyQ a, PolyQ b) {
  PolyQ u0(Rat(1)), v0, u1, v1(Rat(1));
  while (!b.is_zero()) {
    auto [q, r] = divrem(a, b);
    a = b;
    b = r;
    PolyQ u2 = u0 - q * u1, v2 = v0 - q * v1;
    u0 = u1;
    v0 = v1;
    u1 = u2;
    v1 = v2;
  }
  if (a.is_zero()) return {a, u0, v0};
  Rat il = Rat(1) / a.lc();
  return {il * a, il * u0, il * v0};
}

// Quadratic lifting of a factor pair g*h = f mod p^small toward mod p^W.
// Each round recomputes an exact rational Bezout identity for the current
// pair; with E = v_p(Res(g, h)) the error valuation advances by at least
// m - 2E per round, so convergence requires the entry error to exceed 2E.
// Returns nullopt instead of guessing when progress stalls.
std::optional<std::pair<ZPoly, ZPoly>> pair_lift(const ZPoly& f, long W,
                                                 ZPoly g, ZPoly h,
                                                 const Int& p) {
  Int m = pw(p, W);
  PolyQ target = lift_bal(f, m);
  long last = -1;
  for (int round = 0; round < 200; ++round) {
    PolyQ gl = lift_bal(g, m), hl = lift_bal(h, m);
    PolyQ err = target - gl * hl;
    // Work with the balanced residual so valuations are meaningful.
    err = lift_bal(zp_from(err, m), m);
    long ev = poly_min_val(err, p);
    if (ev >= W) return {{g, h}};
    if (ev <= last) return std::nullopt;
    last = ev;
    auto [gg, u, v] = poly_ext_gcd(gl, hl);
    if (gg.is_zero() || gg.degree() != 0) return std::nullopt;
    PolyQ dh = rem(u * err, hl);
    PolyQ dg = quo(err - gl * dh, hl);
    if (poly_min_val(dh, p) < 1 || poly_min_val(dg, p) < 1)
      return std::nullopt;
    g = zp_from(gl + dg, m);
    h = zp_from(hl + dh, m);
  }
  return std::nullopt;
}

// B(t + r) mod p^W by Horner.
ZPoly app_shift_poly(const ZPoly& c, const Int& r, const Int& m) {
  ZPoly lin = zp_trim({canon(r, m), Int(1)});
  ZPoly res;
  for (int i = zp_deg(c); i >= 0; --i) {
    res = zp_mul(res, lin, m);
    res = zp_add(res, zp_trim({canon(c[static_cast<std::size_t>(i)], m)}), m);
  }
  return res;
}

// Valuation floor pattern for a divisor whose Newton polygon is the hull
// section [a, b]: lo[i] = ceil(hull(a+i) - hull(b)), with equality at i = 0.
struct BfsShape {
  int deg = 0;
  std::vector<long> lo;   // floors for coefficients 0..deg-1
  bool c0_exact = false;  // v(c_0) equals lo[0] exactly
  ZPoly seed;             // nonempty: start population = {seed} at level 1
};

// Hull value at integer x, rounded up; hull vertices are integer points.
long hull_ceil(const std::vector<std::pair<long, long>>& hull, long x) {
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    auto [x1, y1] = hull[k];
    auto [x2, y2] = hull[k + 1];
    if (x >= x1 && x <= x2)
      return y1 + ceil_q((x - x1) * (y2 - y1), x2 - x1);
  }
  throw std::logic_error("factor_qp internal: hull evaluation out of range");
}

BfsShape shape_from_hull(const std::vector<std::pair<long, long>>& hull,
                         long a, long b) {
  BfsShape s;
  s.deg = static_cast<int>(b - a);
  long yb = hull_ceil(hull, b);  // b is a vertex, so this is exact
  for (long i = 0; i < b - a; ++i)
    s.lo.push_back(hull_ceil(hull, a + i) - yb);
  s.c0_exact = true;
  return s;
}

struct SplitPair {
  App g, h;
};

// Breadth-first divisor search for a monic degree-shape.deg factor of B.
// Candidates are refined digit by digit; a candidate survives level L when
// rem(B, H) = 0 mod p^L. Survivors are certified by measuring the exact
// resultant E of the balanced candidate pair and pair-lifting once the level
// exceeds 2E; the lifted pair is verified by multiplication. A true factor
// H* with cofactor Q* has v(Res(H*, Q*)) <= e_cap/2, so it certifies at
// level e_cap + 1 at the latest: an empty or uncertified population at
// level e_cap + 3 proves there is no divisor of this shape.
std::optional<SplitPair> bfs_divisor(const App& B, const BfsShape& shape,
                                     long e_cap, const Int& p,
                                     SearchBudget& budget) {
  const Int m = pw(p, B.W);
  const int d = zp_deg(B.c);
  const int dh = shape.deg;
  const long lmax = std::min(e_cap + 3, B.W - 2);
  if (lmax < 3) throw shortfall{};

  // A candidate is the dense coefficient vector c[0..dh], c[dh] = 1.
  std::vector<std::vector<Int>> pop;
  long level;  // population is exact mod p^level
  if (!shape.seed.empty()) {
    std::vector<Int> c(static_cast<std::size_t>(dh) + 1, Int(0));
    for (int i = 0; i <= zp_deg(shape.seed); ++i)
      c[static_cast<std::size_t>(i)] = shape.seed[static_cast<std::size_t>(i)];
    c[static_cast<std::size_t>(dh)] = 1;
    pop.push_back(std::move(c));
    level = 1;
  } else {
    pop.emplace_back(static_cast<std::size_t>(dh) + 1, Int(0));
    pop.back()[static_cast<std::size_t>(dh)] = 1;
    level = 0;
  }

  auto floor_of = [&](int i) {
    return shape.lo.empty() ? 0L : shape.lo[static_cast<std::size_t>(i)];
  };

  while (level < lmax) {
    const Int step = pw(p, level);
    // Free digit positions at this level (same for every candidate).
    std::vector<int> free_pos;
    for (int i = 0; i < dh; ++i)
      if (floor_of(i) <= level) free_pos.push_back(i);
    std::vector<std::vector<Int>> next;
    for (const auto& cand : pop) {
      std::vector<long> digit(free_pos.size(), 0);
      // Odometer over all digit tuples.
      for (;;) {
        budget.tick();
        std::vector<Int> child = cand;
        for (std::size_t k = 0; k < free_pos.size(); ++k)
          if (digit[k] != 0)
            child[static_cast<std::size_t>(free_pos[k])] += digit[k] * step;
        bool ok = true;
        // Exact-floor constraint: the digit of c_0 at level lo[0] is nonzero.
        if (shape.c0_exact && floor_of(0) == level) {
          Int c0 = child[0];
          if ((c0 / step) % p == 0) ok = false;
        }
        if (ok) {
          ZPoly h = zp_trim(child);
          auto [q, r] = zp_divrem(B.c, h, m);
          bool div = true;
          for (const Int& rc : r)
            if (vint(rc, p) < level + 1) {
              div = false;
              break;
            }
          if (div) {
            // Certification attempt: measured resultant controls lifting.
            if (level + 1 >= 3 && zp_deg(q) == d - dh) {
              PolyQ hb = lift_bal(h, m), qb = lift_bal(q, m);
              Rat res = resultant(hb, qb);
              if (res != 0) {
                long eh = valuation(res, p);
                if (level + 1 > 2 * eh) {
                  auto lifted = pair_lift(B.c, B.W, h, q, p);
                  if (lifted) {
                    ZPoly prod = zp_mul(lifted->first, lifted->second, m);
                    if (prod == B.c) {
                      long wc = B.W - eh;
                      return SplitPair{App{lifted->first, wc},
                                       App{lifted->second, wc}};
                    }
                  }
                }
              }
            }
            next.push_back(std::move(child));
            if (next.size() > SearchBudget::kMaxPopulation)
              throw budget_error("factor_qp: divisor population overflow",
                                 budget.nodes);
          }
        }
        // Advance the odometer.
        std::size_t k = 0;
        for (; k < digit.size(); ++k) {
          if (++digit[k] < p) break;
          digit[k] = 0;
        }
        if (k == digit.size()) break;
      }
    }
    pop = std::move(next);
    ++level;
    if (pop.empty()) return std::nullopt;  // no divisor of this shape exists
  }
  // Survivors remain. When the full certification depth e_cap + 3 was
  // reached they are all spurious (a true factor pair has resultant
  // valuation at most e_cap / 2 and certifies by level e_cap + 1); with a
  // truncated depth nothing is proven.
  if (lmax >= e_cap + 3) return std::nullopt;
  throw shortfall{};
}

std::vector<App> factor_app(const App& B, const PolyQ* exact, const Int& p,
                            long target_n, long e_cap, bool allow_compose,
                            SearchBudget& budget, int depth);

// Splits B along its coprime blocks mod p (E = 0 lifting) and recurses.
std::vector<App> split_blocks(const App& B,
                              const std::vector<std::pair<ZPoly, int>>& fl,
                              const Int& p, long target_n, long e_cap,
                              SearchBudget& budget, int depth) {
  std::vector<App> out;
  App cur = B;
  for (std::size_t i = 0; i + 1 < fl.size(); ++i) {
    ZPoly g0 = {Int(1)};
    for (int j = 0; j < fl[i].second; ++j) g0 = zp_mul(g0, fl[i].first, p);
    ZPoly h0 = {Int(1)};
    for (std::size_t k = i + 1; k < fl.size(); ++k)
      for (int j = 0; j < fl[k].second; ++j) h0 = zp_mul(h0, fl[k].first, p);
    auto lifted = pair_lift(cur.c, cur.W, g0, h0, p);
    if (!lifted) throw shortfall{};
    auto sub = factor_app(App{lifted->first, cur.W}, nullptr, p, target_n,
                          e_cap, false, budget, depth + 1);
    out.insert(out.end(), sub.begin(), sub.end());
    cur = App{lifted->second, cur.W};
  }
  auto sub = factor_app(cur, nullptr, p, target_n, e_cap, false, budget,
                        depth + 1);
  out.insert(out.end(), sub.begin(), sub.end());
  return out;
}

// Closed-form treatment of a quadratic block via the discriminant: exact
// square classification in Q_p, then sqrt_mod_pN for the roots.
std::vector<App> quad_split(const App& B, const Int& p, long target_n) {
  const Int m = pw(p, B.W);
  Int b = zp_deg(B.c) >= 1 ? B.c[1] : Int(0);
  Int c0 = B.c[0];
  Int disc = balanced_mod(b * b - 4 * c0, m);
  long v = vint(disc, p);
  if (v >= B.W - 2) throw shortfall{};
  if (v % 2 != 0) return {B};
  Int mv = pw(p, B.W - v);
  Int u = canon(disc / pw(p, v), mv);
  if (p == 2) {
    if (canon(u, 8) != 1) return {B};
  } else {
    if (legendre(u, p) != 1) return {B};
  }
  long wr = B.W - v - 2;
  if (wr < target_n) throw shortfall{};
  Int s = sqrt_mod_pN(u, p, B.W - v);
  Int sq = pw(p, v / 2) * s;
  Int mr = pw(p, wr);
  // Roots (-b +- sq)/2; both numerators are even when p = 2 since the block
  // has p-integral roots.
  Int m2 = pw(p, wr + 2);
  Int n1 = canon(-b + sq, m2), n2 = canon(-b - sq, m2);
  Int r1, r2;
  if (p == 2) {
    if (n1 % 2 != 0 || n2 % 2 != 0)
      throw std::logic_error("factor_qp internal: odd quadratic root numerator");
    r1 = canon(n1 / 2, mr);
    r2 = canon(n2 / 2, mr);
  } else {
    Int half = mod_inverse(Int(2), mr);
    r1 = canon(n1 * half, mr);
    r2 = canon(n2 * half, mr);
  }
  App f1{zp_trim({canon(-r1, mr), Int(1)}), wr};
  App f2{zp_trim({canon(-r2, mr), Int(1)}), wr};
  return {f1, f2};
}

// Largest k with the exact model supported on multiples of k (k = 1 when
// no deflation is possible). The constant term is nonzero for our inputs.
long support_gcd(const PolyQ& f) {
  long g = 0;
  for (int i = 1; i <= f.degree(); ++i)
    if (f.coeff(i) != 0) g = std::gcd(g, static_cast<long>(i));
  return g == 0 ? 1 : g;
}

std::vector<App> core_model(const PolyQ& model, const Int& p, long target_n,
                            bool allow_compose, SearchBudget& budget);

// Dispatch on one approximant: block split mod p, quadratic closed form,
// t^k-composition deflation (exact models only), Newton polygon analysis
// after shifting the repeated root to 0, and shape-constrained divisor
// search as the last resort.
std::vector<App> factor_app(const App& B, const PolyQ* exact, const Int& p,
                            long target_n, long e_cap, bool allow_compose,
                            SearchBudget& budget, int depth) {
  if (depth > 64)
    throw std::logic_error("factor_qp internal: recursion depth exceeded");
  const int d = zp_deg(B.c);
  if (d <= 1) return {B};
  if (B.W < target_n + 2) throw shortfall{};
  const Int m = pw(p, B.W);

  auto fl = zp_factor(zp_reduce(B.c, p), p);
  if (fl.size() > 1)
    return split_blocks(B, fl, p, target_n, e_cap, budget, depth);
  const ZPoly& q = fl[0].first;
  const int mult = fl[0].second;
  if (mult == 1) return {B};
  if (d == 2) return quad_split(B, p, target_n);

  if (exact != nullptr && allow_compose) {
    long k = support_gcd(*exact);
    long dd = static_cast<long>(exact->degree()) / k;
    if (k >= 2 && dd >= 2) {
      std::vector<Rat> dc;
      for (long j = 0; j <= dd; ++j)
        dc.push_back(exact->coeff(static_cast<int>(j * k)));
      PolyQ defl{dc};
      auto parts = core_model(defl, p, target_n, false, budget);
      if (parts.size() == 1) {
        // The deflation is irreducible; retry the model itself without
        // composition (its inflation can still factor).
        return factor_app(B, exact, p, target_n, e_cap, false, budget,
                          depth + 1);
      }
      std::vector<App> out;
      const std::size_t ks = static_cast<std::size_t>(k);
      for (const App& part : parts) {
        ZPoly infl(static_cast<std::size_t>(zp_deg(part.c)) * ks + 1, Int(0));
        for (int i = 0; i <= zp_deg(part.c); ++i)
          infl[static_cast<std::size_t>(i) * ks] =
              part.c[static_cast<std::size_t>(i)];
        App pulled{zp_reduce(infl, pw(p, part.W)), part.W};
        auto sub = factor_app(pulled, nullptr, p, target_n, e_cap, false,
                              budget, depth + 1);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
  }

  if (zp_deg(q) == 1) {
    // Single repeated linear factor: shift its root to 0 and read the
    // Newton polygon.
    Int r = balanced_mod(-q[0], p);
    ZPoly cs = app_shift_poly(B.c, r, m);
    const long cap = B.W - 2;
    std::vector<long> vals;
    bool c0_capped = false;
    for (int i = 0; i <= d; ++i) {
      long v = vint(cs[static_cast<std::size_t>(i)], p);
      if (v >= cap) {
        if (i == 0) c0_capped = true;
        v = VAL_INF;  // true valuation unknown; the point lies above the hull
      }
      vals.push_back(v);
    }
    if (c0_capped) throw shortfall{};
    auto hull = newton_polygon(vals);

    auto unshift = [&](const App& a) {
      Int ma = pw(p, a.W);
      return App{app_shift_poly(a.c, canon(-r, ma), ma), a.W};
    };
    auto recurse_pair = [&](const SplitPair& sp) {
      std::vector<App> out;
      auto s1 = factor_app(unshift(sp.g), nullptr, p, target_n, e_cap, false,
                           budget, depth + 1);
      auto s2 = factor_app(unshift(sp.h), nullptr, p, target_n, e_cap, false,
                           budget, depth + 1);
      out.insert(out.end(), s1.begin(), s1.end());
      out.insert(out.end(), s2.begin(), s2.end());
      return out;
    };

    if (hull.size() == 2) {
      long rise = hull[0].second - hull[1].second;
      long run = hull[1].first;
      long g = std::gcd(rise, run);
      long h = rise / g, b = run / g;
      if (b == run) return {B};  // totally ramified: irreducible
      if (b == 1) {
        // Integer slope: substitute t -> p^h t and recurse at unit level.
        long wn = B.W - h * d;
        if (wn < target_n + 2) throw shortfall{B.W + h * d + 4};
        Int mn = pw(p, wn);
        ZPoly scaled;
        for (int i = 0; i <= d; ++i) {
          Int ci = cs[static_cast<std::size_t>(i)];
          scaled.push_back(canon(ci / pw(p, h * (d - i)), mn));
        }
        auto sub = factor_app(App{zp_trim(scaled), wn}, nullptr, p, target_n,
                              e_cap, false, budget, depth + 1);
        std::vector<App> out;
        for (const App& f : sub) {
          int df = zp_deg(f.c);
          Int mf = pw(p, f.W);
          ZPoly up;
          for (int i = 0; i <= df; ++i)
            up.push_back(
                canon(f.c[static_cast<std::size_t>(i)] * pw(p, h * (df - i)),
                      mf));
          out.push_back(unshift(App{zp_trim(up), f.W}));
        }
        return out;
      }
      // Pure fractional slope h/b with b < d: factors have degree
      // divisible by b; search ascending.
      for (long dh = b; dh <= d / 2; dh += b) {
        // Floors for a pure-slope divisor: lo[i] = ceil((dh-i) h/b), with
        // equality at i = 0 (b divides dh, so the bound there is integral).
        BfsShape shape;
        shape.deg = static_cast<int>(dh);
        for (long i = 0; i < dh; ++i)
          shape.lo.push_back(ceil_q((dh - i) * h, b));
        shape.c0_exact = true;
        App bs{cs, B.W};
        auto found = bfs_divisor(bs, shape, e_cap, p, budget);
        if (found) return recurse_pair(*found);
      }
      return {B};
    }

    // Several segments: the polygon forces a split. Search the side with
    // the smaller degree.
    long ell = hull[1].first;
    BfsShape shape;
    if (ell <= d - ell) {
      shape = shape_from_hull(hull, 0, ell);
    } else {
      shape = shape_from_hull(hull, ell, d);
    }
    App bs{cs, B.W};
    auto found = bfs_divisor(bs, shape, e_cap, p, budget);
    if (!found) throw shortfall{};
    return recurse_pair(*found);
  }

  // Repeated factor of degree >= 2: plain seeded search over q^j.
  for (int j = 1; j <= mult / 2; ++j) {
    ZPoly seed = {Int(1)};
    for (int i = 0; i < j; ++i) seed = zp_mul(seed, q, p);
    BfsShape shape;
    shape.deg = j * zp_deg(q);
    shape.lo.assign(static_cast<std::size_t>(shape.deg), 0);
    shape.c0_exact = false;
    shape.seed = seed;
    auto found = bfs_divisor(B, shape, e_cap, p, budget);
    if (found) {
      std::vector<App> out;
      auto s1 = factor_app(found->g, nullptr, p, target_n, e_cap, false,
                           budget, depth + 1);
      auto s2 = factor_app(found->h, nullptr, p, target_n, e_cap, false,
                           budget, depth + 1);
      out.insert(out.end(), s1.begin(), s1.end());
      out.insert(out.end(), s2.begin(), s2.end());
      return out;
    }
  }
  return {B};
}

// Full treatment of one monic p-integral Q-irreducible model: unramified
// inputs go through factor mod p + Hensel; ramified ones through factor_app
// under a doubling working precision.
std::vector<App> core_model(const PolyQ& model, const Int& p, long target_n,
                            bool allow_compose, SearchBudget& budget) {
  const int d = model.degree();
  if (d == 1) return {App{zp_from(model, pw(p, target_n)), target_n}};
  Rat res = resultant(model, model.derivative());
  if (res == 0)
    throw std::logic_error("factor_qp internal: model not squarefree");
  long e = valuation(res, p);
  if (e == 0) {
    auto fl = zp_factor(zp_from(model, p), p);
    if (fl.size() == 1)
      return {App{zp_from(model, pw(p, target_n)), target_n}};
    long npow = 1;
    while (npow < target_n) npow *= 2;
    std::vector<ZPoly> base;
    for (const auto& [q, mq] : fl) {
      if (mq != 1)
        throw std::logic_error("factor_qp internal: unramified multiplicity");
      base.push_back(q);
    }
    auto lifted = hensel_lift(zp_from(model, pw(p, npow)), base, p,
                              static_cast<unsigned long>(target_n));
    std::vector<App> out;
    for (auto& f : lifted)
      out.push_back(App{zp_reduce(f, pw(p, target_n)), target_n});
    return out;
  }
  long w = std::max({2 * target_n, 2 * e + 8, 16L});
  for (int attempt = 0; attempt < 12; ++attempt) {
    try {
      App b{zp_from(model, pw(p, w)), w};
      auto out = factor_app(b, &model, p, target_n, e, allow_compose, budget,
                            0);
      bool enough = true;
      for (const App& f : out)
        if (f.W < target_n) enough = false;
      if (enough) return out;
      w *= 2;
    } catch (const shortfall& s) {
      w = std::max(2 * w, s.need);
    }
    if (w > (1L << 22))
      throw precision_error("factor_qp: working precision exhausted", w);
  }
  throw precision_error("factor_qp: working precision exhausted", w);
}

}  // namespace

PadicFactorization factor_qp(const PolyQ& f, const Int& p, long N) {
  if (f.is_zero() || f.degree() < 1)
    throw std::invalid_argument("factor_qp: need degree >= 1");
  if (N < 1) throw std::invalid_argument("factor_qp: N < 1");
  if (!is_prime(p)) throw std::invalid_argument("factor_qp: p must be prime");
  PolyQ der = f.derivative();
  PolyQ g = gcd_monic(f, der);
  if (g.is_zero() || g.degree() != 0)
    throw std::invalid_argument("factor_qp: input must be squarefree");

  PadicFactorization out;
  out.p = p;
  out.N = N;
  out.lc = f.lc();
  PolyQ prim = primitive_part(f);
  Int lcp = prim.lc().get_num();  // primitive part has integer coefficients
  long a = lcp % p == 0 ? valuation(lcp, p) : 0;
  Int s = pw(p, a);
  out.scale = Rat(s);

  SearchBudget budget;
  std::vector<App> apps;
  auto fq = factor_q(f);
  for (const auto& [piece, mult] : fq.factors) {
    if (mult != 1)
      throw std::invalid_argument("factor_qp: input must be squarefree");
    // Global substitution u = s t makes every piece p-integral monic.
    std::vector<Rat> mc;
    int dp = piece.degree();
    for (int i = 0; i <= dp; ++i) {
      Rat ci = piece.coeff(i) * Rat(pow_int(s, static_cast<unsigned long>(dp - i)));
      if (ci != 0 && valuation(ci, p) < 0)
        throw std::logic_error("factor_qp internal: model not p-integral");
      mc.push_back(ci);
    }
    PolyQ model{mc};
    auto sub = core_model(model, p, N, true, budget);
    apps.insert(apps.end(), sub.begin(), sub.end());
  }

  Int m = pw(p, N);
  for (const App& ap : apps) {
    PadicPoly fac;
    fac.p = p;
    fac.N = N;
    fac.c = zp_reduce(ap.c, m);
    fac.shift = a;
    out.factors.push_back(std::move(fac));
  }
  std::sort(out.factors.begin(), out.factors.end(),
            [&](const PadicPoly& x, const PadicPoly& y) {
              if (x.degree() != y.degree()) return x.degree() < y.degree();
              for (int i = x.degree(); i >= 0; --i) {
                Int bx = balanced_mod(x.c[static_cast<std::size_t>(i)], m);
                Int by = balanced_mod(y.c[static_cast<std::size_t>(i)], m);
                if (bx != by) return bx < by;
              }
              return false;
            });

  // Certificate: the product of the factors reproduces the monic model of
  // the full input mod p^N.
  std::vector<Rat> fc;
  PolyQ fm = f.monic();
  for (int i = 0; i <= f.degree(); ++i)
    fc.push_back(fm.coeff(i) *
                 Rat(pow_int(s, static_cast<unsigned long>(f.degree() - i))));
  ZPoly full = zp_from(PolyQ{fc}, m);
  ZPoly prod = {Int(1)};
  for (const PadicPoly& fac : out.factors) prod = zp_mul(prod, fac.c, m);
  if (prod != full)
    throw std::logic_error("factor_qp internal: product check failed");
  return out;
}

PadicKernel kernel_mod_pN(const std::vector<std::vector<Int>>& mat,
                          const Int& p, long N) {
  if (N < 1) throw std::invalid_argument("kernel_mod_pN: N < 1");
  const std::size_t rows = mat.size();
  const std::size_t cols = rows == 0 ? 0 : mat[0].size();
  for (const auto& r : mat)
    if (r.size() != cols)
      throw std::invalid_argument("kernel_mod_pN: ragged matrix");
  Int m = pw(p, N);
  std::vector<std::vector<Int>> a(rows, std::vector<Int>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = canon(mat[i][j], m);
  // Column-operation recorder: kernel vectors are columns of c.
  std::vector<std::vector<Int>> c(cols, std::vector<Int>(cols, Int(0)));
  for (std::size_t j = 0; j < cols; ++j) c[j][j] = 1;

  std::vector<bool> row_used(rows, false), col_used(cols, false);
  long loss = 0;
  for (;;) {
    long best = VAL_INF;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (row_used[i]) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        if (col_used[j]) continue;
        long v = vint(a[i][j], p);
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    // Entries at or above the current certified level N - loss are
    // indistinguishable from the elimination junk of an approximate input,
    // so they must not become pivots: stop here.
    if (best >= N - loss) break;
    loss += best;
    Int unit = a[bi][bj] / pw(p, best);
    Int red = pw(p, N - best);
    Int uinv = mod_inverse(canon(unit, red), red);
    for (std::size_t k = 0; k < cols; ++k) {
      if (k == bj || col_used[k]) continue;
      long vk = vint(a[bi][k], p);
      if (vk >= N) continue;
      // Integral by pivot minimality: v(a[bi][k]) >= best.
      Int ratio = canon(a[bi][k] / pw(p, best) * uinv, red);
      for (std::size_t i = 0; i < rows; ++i)
        a[i][k] = canon(a[i][k] - ratio * a[i][bj], m);
      for (std::size_t i = 0; i < cols; ++i)
        c[i][k] = canon(c[i][k] - ratio * c[i][bj], m);
    }
    row_used[bi] = true;
    col_used[bj] = true;
  }
  long certified = N - loss;
  if (certified <= 0)
    throw precision_error("kernel_mod_pN: precision exhausted", N);
  PadicKernel out;
  out.loss = loss;
  out.certified = certified;
  for (std::size_t j = 0; j < cols; ++j) {
    if (col_used[j]) continue;
    std::vector<Int> v(cols);
    bool all_zero = true;
    for (std::size_t i = 0; i < cols; ++i) {
      v[i] = balanced_mod(c[i][j], m);
      if (vint(v[i], p) < certified) all_zero = false;
    }
    if (all_zero)
      throw precision_error("kernel_mod_pN: degenerate kernel vector", N);
    out.basis.push_back(std::move(v));
  }
  return out;
}

PadicDiagonal diagonalize_mod_pN(const std::vector<std::vector<Int>>& sym,
                                 const Int& p, long N) {
  if (N < 1) throw std::invalid_argument("diagonalize_mod_pN: N < 1");
  const std::size_t n = sym.size();
  for (const auto& r : sym)
    if (r.size() != n)
      throw std::invalid_argument("diagonalize_mod_pN: not square");
  Int m = pw(p, N);
  std::vector<std::vector<Int>> s(n, std::vector<Int>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      s[i][j] = canon(sym[i][j], m);
      if (canon(sym[i][j] - sym[j][i], m) != 0)
        throw std::invalid_argument("diagonalize_mod_pN: not symmetric");
    }

  std::vector<bool> done(n, false);
  std::vector<Int> diag;
  long loss = 0;
  for (std::size_t step = 0; step < n; ++step) {
    // Locate minimal valuations on and off the diagonal.
    long vd = VAL_INF, vo = VAL_INF;
    std::size_t id = 0, io = 0, jo = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      long v = vint(s[i][i], p);
      if (v < vd) {
        vd = v;
        id = i;
      }
      for (std::size_t j = i + 1; j < n; ++j) {
        if (done[j]) continue;
        long w = vint(s[i][j], p);
        if (w < vo) {
          vo = w;
          io = i;
          jo = j;
        }
      }
    }
    // Work only with entries provably nonzero at the current certified
    // level N - loss; anything shallower is indistinguishable from the
    // elimination junk of an approximate input.
    if (vd >= N - loss && vo >= N - loss)
      throw precision_error("diagonalize_mod_pN: block vanishes", N);
    std::size_t piv = id;
    if (vd > vo) {
      // Pull the off-diagonal minimum onto the diagonal with x_i <- x_i +- x_j.
      piv = io;
      int sign = 1;
      if (p == 2) {
        Int sp = canon(s[io][io] + 2 * s[io][jo] + s[jo][jo], m);
        Int sm = canon(s[io][io] - 2 * s[io][jo] + s[jo][jo], m);
        if (vint(sm, p) < vint(sp, p)) sign = -1;
      }
      for (std::size_t k = 0; k < n; ++k) {
        if (done[k]) continue;
        s[io][k] = canon(s[io][k] + sign * s[jo][k], m);
      }
      for (std::size_t k = 0; k < n; ++k) {
        if (done[k]) continue;
        s[k][io] = canon(s[k][io] + sign * s[k][jo], m);
      }
    }
    Int a = s[piv][piv];
    long v = vint(a, p);
    if (v >= N - loss)
      throw precision_error("diagonalize_mod_pN: pivot vanishes", N);
    loss += v;
    Int red = pw(p, N - v);
    Int uinv = mod_inverse(canon(a / pw(p, v), red), red);
    // Rescale rows whose coupling to the pivot is too shallow; multiplying
    // x_k by p^d changes s[k][k] by the square p^(2d).
    for (std::size_t k = 0; k < n; ++k) {
      if (done[k] || k == piv) continue;
      long vk = vint(s[piv][k], p);
      if (vk >= v) continue;
      long dscale = v - vk;
      Int f = pw(p, dscale);
      for (std::size_t l = 0; l < n; ++l) {
        if (done[l]) continue;
        s[k][l] = canon(s[k][l] * f, m);
      }
      for (std::size_t l = 0; l < n; ++l) {
        if (done[l]) continue;
        s[l][k] = canon(s[l][k] * f, m);
      }
    }
    // Schur complement, symmetrized explicitly.
    std::vector<Int> ratio(n, Int(0));
    for (std::size_t k = 0; k < n; ++k) {
      if (done[k] || k == piv) continue;
      ratio[k] = canon(s[piv][k] / pw(p, v) * uinv, red);
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (done[k] || k == piv) continue;
      for (std::size_t l = k; l < n; ++l) {
        if (done[l] || l == piv) continue;
        Int upd = canon(s[k][l] - ratio[k] * s[piv][l], m);
        s[k][l] = upd;
        s[l][k] = upd;
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (k == piv) continue;
      s[piv][k] = 0;
      s[k][piv] = 0;
    }
    done[piv] = true;
    diag.push_back(a);
  }
  long certified = N - loss;
  if (certified <= 0)
    throw precision_error("diagonalize_mod_pN: precision exhausted", N);
  PadicDiagonal out;
  out.loss = loss;
  out.certified = certified;
  Int mc = pw(p, certified);
  for (const Int& a : diag) out.diag.push_back(balanced_mod(a, mc));
  return out;
}

}  // namespace witt
