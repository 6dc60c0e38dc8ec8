#include "witt/quadform.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace witt {

SymForm::SymForm(QMat g) : gram(std::move(g)) {
  if (gram.rows() != gram.cols())
    throw std::invalid_argument("SymForm: not square");
  for (std::size_t i = 0; i < gram.rows(); ++i)
    for (std::size_t j = i + 1; j < gram.cols(); ++j)
      if (gram.at(i, j) != gram.at(j, i))
        throw std::invalid_argument("SymForm: not symmetric");
}

namespace {

// e * c^2 = cls with cls the squarefree integer class of e.
std::pair<Int, Rat> squarefree_scale(const Rat& e) {
  Int cls = squarefree_part(e);
  Int num = e.get_num(), den = e.get_den();
  Int k = isqrt(num * den / cls);  // num * den = cls * k^2
  Rat c(den, k);
  c.canonicalize();
  return {cls, c};
}

}  // namespace

Diagonalization diagonalize(const SymForm& sf) {
  const std::size_t n = sf.dim();
  QMat s = sf.gram;
  QMat p = QMat::identity(n);
  std::vector<bool> done(n, false);
  std::vector<std::size_t> order;
  std::vector<Rat> raw;

  for (;;) {
    std::size_t piv = n;
    for (std::size_t i = 0; i < n && piv == n; ++i)
      if (!done[i] && s.at(i, i) != 0) piv = i;
    if (piv == n) {
      // All usable diagonal entries vanish. Rank-2 fix on the first
      // nonzero off-diagonal pair: x_i <- x_i + x_j has b(x,x) = 2 b_ij.
      std::size_t fi = n, fj = n;
      for (std::size_t i = 0; i < n && fi == n; ++i) {
        if (done[i]) continue;
        for (std::size_t j = i + 1; j < n && fi == n; ++j)
          if (!done[j] && s.at(i, j) != 0) {
            fi = i;
            fj = j;
          }
      }
      if (fi == n) break;  // remaining block is the radical
      for (std::size_t k = 0; k < n; ++k) s.at(fi, k) += s.at(fj, k);
      for (std::size_t k = 0; k < n; ++k) s.at(k, fi) += s.at(k, fj);
      for (std::size_t k = 0; k < n; ++k) p.at(k, fi) += p.at(k, fj);
      piv = fi;
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (done[k] || k == piv || s.at(piv, k) == 0) continue;
      Rat r = s.at(piv, k) / s.at(piv, piv);
      for (std::size_t l = 0; l < n; ++l) s.at(l, k) -= r * s.at(l, piv);
      for (std::size_t l = 0; l < n; ++l) s.at(k, l) -= r * s.at(piv, l);
      for (std::size_t l = 0; l < n; ++l) p.at(l, k) -= r * p.at(l, piv);
    }
    done[piv] = true;
    order.push_back(piv);
    raw.push_back(s.at(piv, piv));
  }

  Diagonalization out;
  out.radical = n - order.size();
  out.basis = QMat(n, n);
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    auto [cls, c] = squarefree_scale(raw[idx]);
    out.entries.push_back(cls);
    for (std::size_t i = 0; i < n; ++i)
      out.basis.at(i, idx) = c * p.at(i, order[idx]);
  }
  std::size_t idx = order.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (done[j]) continue;
    for (std::size_t i = 0; i < n; ++i) out.basis.at(i, idx) = p.at(i, j);
    ++idx;
  }
  return out;
}

int hasse(const Diagonalization& d, const Place& v) {
  int h = 1;
  for (std::size_t i = 0; i < d.entries.size(); ++i)
    for (std::size_t j = i + 1; j < d.entries.size(); ++j)
      h *= hilbert(Rat(d.entries[i]), Rat(d.entries[j]), v);
  return h;
}

long beta_local(const Diagonalization& d, const Place& v) {
  const auto& a = d.entries;
  const long n = static_cast<long>(a.size());
  if (n == 0) return 0;
  if (v.is_real) {
    long sig = 0;
    for (const Int& x : a) sig += x > 0 ? 1 : -1;
    return sig < 0 ? -sig : sig;
  }
  const long l = n / 2;
  Rat dd = 1;
  for (const Int& x : a) dd *= Rat(x);
  int et = hasse(d, v);
  if (l % 2) et *= hilbert(Rat(-1), dd, v);
  if ((l * (l + 1) / 2) % 2) et *= hilbert(Rat(-1), Rat(-1), v);
  if (n % 2 == 0) {
    Rat dt = l % 2 ? -dd : dd;
    if (!is_square_local(dt, v)) return 2;
    return et == 1 ? 0 : 4;
  }
  return et == 1 ? 1 : 3;
}

FormInvariants beta_global(const SymForm& s) {
  Diagonalization d = diagonalize(s);
  FormInvariants out;
  out.n = s.dim();
  out.radical = d.radical;
  Int prod = 1, g = 0;
  std::set<Int> ps;
  for (const Int& a : d.entries) {
    out.signature += a > 0 ? 1 : -1;
    prod *= a;
    g = gcd(g, a);
    for (const auto& [q, e] : factor_integer(abs(a))) ps.insert(q);
  }
  out.disc = d.entries.empty() ? Int(1) : squarefree_part(prod);
  std::vector<Place> survey = {Place::real(), Place::prime(2)};
  for (const Int& q : ps) {
    if (q == 2 || g % q == 0) continue;
    out.odd_primes.push_back(q);
    survey.push_back(Place::prime(q));
  }
  long best = 0;
  for (const Place& v : survey) {
    out.hasse_at.emplace_back(v, hasse(d, v));
    long b = beta_local(d, v);
    out.beta_at.emplace_back(v, b);
    best = std::max(best, b);
  }
  out.beta = best - static_cast<long>(out.radical);
  return out;
}

namespace {

// Enumeration of primitive integer vectors ordered by height then lex,
// with the last coordinate solved from the quadratic it must satisfy.
struct WitnessSearch {
  long bound;
  unsigned long long nodes = 0;
  bool stopped = false;
  static constexpr unsigned long long kMaxNodes = 1ull << 26;

  const std::vector<std::vector<Int>>* g = nullptr;  // integer Gram, m x m
  std::size_t m = 0;
  long h = 0;
  std::vector<Int> x;

  bool accept(const Int& y) const {
    if (abs(y) > h) return false;
    Int mx = abs(y);
    for (std::size_t i = 0; i + 1 < m; ++i)
      if (abs(x[i]) > mx) mx = abs(x[i]);
    if (mx != h) return false;  // lower heights were already swept
    Int gg = abs(y);
    int first = y != 0 ? (y > 0 ? 1 : -1) : 0;
    for (std::size_t i = m - 1; i-- > 0;) {
      gg = gcd(gg, x[i]);
      if (x[i] != 0) first = x[i] > 0 ? 1 : -1;
    }
    return first == 1 && gg == 1;
  }

  // acc[k] = sum_i g[i][k] x_i over the prefix, c = q(prefix). While the
  // prefix is still all zero (lead_zero), negative values are skipped:
  // accept() demands a positive leading coordinate, so those subtrees hold
  // no admissible vector and pruning them cannot change the first hit.
  std::optional<std::vector<Int>> rec(std::size_t idx, Int c,
                                      std::vector<Int> acc, bool lead_zero) {
    if (stopped) return std::nullopt;
    if (idx + 1 == m) {
      if (++nodes > kMaxNodes) {
        stopped = true;
        return std::nullopt;
      }
      return solve_last(c, acc[idx]);
    }
    const auto& gr = *g;
    for (long v = lead_zero ? 0 : -h; v <= h; ++v) {
      x[idx] = v;
      if (v == 0) {
        auto r = rec(idx + 1, c, acc, lead_zero);
        if (r) return r;
        continue;
      }
      Int vi(v);
      Int c2 = c + gr[idx][idx] * vi * vi + 2 * vi * acc[idx];
      std::vector<Int> a2 = acc;
      for (std::size_t k = 0; k < m; ++k) a2[k] += gr[idx][k] * vi;
      auto r = rec(idx + 1, c2, a2, false);
      if (r) return r;
    }
    return std::nullopt;
  }

  // q(prefix, y) = a y^2 + b y + c with a = g[m-1][m-1], b = 2 acc[m-1].
  std::optional<std::vector<Int>> solve_last(const Int& c, const Int& acc_last) {
    const Int a = (*g)[m - 1][m - 1];
    const Int b = 2 * acc_last;
    std::vector<Int> roots;
    if (a == 0 && b == 0) {
      if (c != 0) return std::nullopt;
      for (long y = -h; y <= h; ++y) roots.push_back(Int(y));
    } else if (a == 0) {
      if (c % b == 0) roots.push_back(-c / b);
    } else {
      Int disc = b * b - 4 * a * c;
      if (disc < 0) return std::nullopt;
      Int s = isqrt(disc);
      if (s * s != disc) return std::nullopt;
      const Int lo = -b - s, hi = -b + s;
      for (const Int& num : {lo, hi})
        if (num % (2 * a) == 0) roots.push_back(num / (2 * a));
      std::sort(roots.begin(), roots.end());
      roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    }
    for (const Int& y : roots) {
      if (!accept(y)) continue;
      std::vector<Int> full(x.begin(), x.begin() + static_cast<long>(m) - 1);
      full.push_back(y);
      return full;
    }
    return std::nullopt;
  }

  std::optional<std::vector<Int>> find(const std::vector<std::vector<Int>>& gi) {
    g = &gi;
    m = gi.size();
    if (m == 1) {
      if (gi[0][0] == 0) return std::vector<Int>{1};
      return std::nullopt;
    }
    for (h = 1; h <= bound && !stopped; ++h) {
      x.assign(m, Int(0));
      auto r = rec(0, Int(0), std::vector<Int>(m, Int(0)), true);
      if (r) return r;
    }
    return std::nullopt;
  }
};

// Clear denominators and primitivize a rational column vector.
std::vector<Int> primitive_vector(const std::vector<Rat>& w) {
  Int den = 1;
  for (const Rat& r : w) den = lcm(den, Int(r.get_den()));
  std::vector<Int> v;
  Int g = 0;
  for (const Rat& r : w) {
    Rat t = r * Rat(den);
    v.push_back(t.get_num());
    g = gcd(g, v.back());
  }
  int first = 0;
  for (const Int& c : v)
    if (c != 0) {
      first = c > 0 ? 1 : -1;
      break;
    }
  for (Int& c : v) c /= first < 0 ? -g : g;
  return v;
}

}  // namespace

std::optional<std::vector<std::vector<Int>>> isotropic_witness(
    const SymForm& sf, long height_bound) {
  if (height_bound < 1)
    throw std::invalid_argument("isotropic_witness: height_bound < 1");
  const std::size_t n = sf.dim();
  std::vector<std::vector<Int>> found;
  QMat basis = QMat::identity(n);
  WitnessSearch search{height_bound};

  while (basis.cols() > 0 && !search.stopped) {
    const std::size_t m = basis.cols();
    QMat g = basis.transpose() * sf.gram * basis;

    // Definite restrictions carry no isotropic vectors at all.
    Diagonalization dg = diagonalize(SymForm(g));
    if (dg.radical == 0 && !dg.entries.empty()) {
      bool pos = true, neg = true;
      for (const Int& e : dg.entries) {
        pos = pos && e > 0;
        neg = neg && e < 0;
      }
      if (pos || neg) break;
    }

    Int den = 1;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        den = lcm(den, Int(g.at(i, j).get_den()));
    std::vector<std::vector<Int>> gi(m, std::vector<Int>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        Rat t = g.at(i, j) * Rat(den);
        gi[i][j] = t.get_num();
      }

    auto x = search.find(gi);
    if (!x) break;

    std::vector<Rat> w(n, Rat(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) w[i] += basis.at(i, j) * Rat((*x)[j]);
    found.push_back(primitive_vector(w));

    // Restrict to (orthogonal complement of x) / x.
    QMat row(1, m);
    for (std::size_t j = 0; j < m; ++j) {
      Rat acc = 0;
      for (std::size_t i = 0; i < m; ++i) acc += Rat((*x)[i]) * g.at(i, j);
      row.at(0, j) = acc;
    }
    QMat ker = right_kernel(row);
    QMat ext(m, 1 + ker.cols());
    for (std::size_t i = 0; i < m; ++i) {
      ext.at(i, 0) = Rat((*x)[i]);
      for (std::size_t j = 0; j < ker.cols(); ++j)
        ext.at(i, j + 1) = ker.at(i, j);
    }
    std::vector<std::size_t> piv = pivot_columns(ext);
    std::vector<std::size_t> keep;
    for (std::size_t j : piv)
      if (j > 0) keep.push_back(j);
    basis = basis * select_columns(ext, keep);
  }
  if (found.empty()) return std::nullopt;
  return found;
}

}  // namespace witt
