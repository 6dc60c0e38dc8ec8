#include "witt/sturm.hpp"

#include <algorithm>
#include <stdexcept>

#include "witt/polyfactor.hpp"

namespace witt {

namespace {

std::vector<PolyQ> sturm_chain(const PolyQ& f) {
  std::vector<PolyQ> chain{f, f.derivative()};
  while (!chain.back().is_zero()) {
    const PolyQ& a = chain[chain.size() - 2];
    const PolyQ& b = chain.back();
    PolyQ r = -rem(a, b);
    chain.push_back(std::move(r));
  }
  chain.pop_back();
  return chain;
}

int variations(const std::vector<PolyQ>& chain, const Rat& x) {
  int count = 0, prev = 0;
  for (const auto& p : chain) {
    Rat v = p.eval(x);
    int s = v == 0 ? 0 : (v > 0 ? 1 : -1);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++count;
    prev = s;
  }
  return count;
}

// Number of distinct roots in (a, b]; with f(b) != 0 this is the open count.
int count_roots(const std::vector<PolyQ>& chain, const Rat& a, const Rat& b) {
  return variations(chain, a) - variations(chain, b);
}

// A split point in (a, b) staying clear of the listed points, so interval
// endpoints are never roots of the original polynomial.
Rat safe_split(const Rat& a, const Rat& b, const std::vector<Rat>& avoid) {
  Rat s = (a + b) / 2;
  while (std::find(avoid.begin(), avoid.end(), s) != avoid.end())
    s = (a + s) / 2;
  return s;
}

// f has no rational roots here, so split points are never roots of f itself.
void isolate(const std::vector<PolyQ>& chain, const PolyQ& f, const Rat& lo,
             const Rat& hi, const std::vector<Rat>& avoid,
             std::vector<std::pair<Rat, Rat>>& out) {
  int n = count_roots(chain, lo, hi);
  if (n == 0) return;
  if (n == 1) {
    out.emplace_back(lo, hi);
    return;
  }
  Rat mid = safe_split(lo, hi, avoid);
  isolate(chain, f, lo, mid, avoid, out);
  isolate(chain, f, mid, hi, avoid, out);
}

}  // namespace

std::vector<std::pair<Rat, Rat>> isolate_real_roots(const PolyQ& f,
                                                    const Rat& lo,
                                                    const Rat& hi) {
  if (f.is_zero()) throw std::invalid_argument("isolate_real_roots on zero");
  if (lo >= hi) throw std::invalid_argument("empty isolation interval");
  PolyQ sf = f;
  if (f.degree() >= 1) {
    PolyQ g = gcd_monic(f, f.derivative());
    if (!g.is_zero() && g.degree() >= 1) sf = quo(f, g);
  }
  if (sf.eval(lo) == 0 || sf.eval(hi) == 0)
    throw std::invalid_argument("isolation endpoint is a root");
  if (sf.degree() == 0) return {};

  // Split off the rational roots exactly; Sturm bisection alone cannot tell
  // a rational root from an irrational one.
  std::vector<Rat> exact;
  PolyQ rest = sf.monic();
  for (const auto& [h, m] : factor_q(sf).factors) {
    if (h.degree() != 1) continue;
    Rat root = -h.coeff(0);
    rest = quo(rest, h);
    if (root > lo && root < hi) exact.push_back(root);
  }
  std::sort(exact.begin(), exact.end());

  std::vector<std::pair<Rat, Rat>> irr;
  if (!rest.is_zero() && rest.degree() >= 1) {
    auto chain = sturm_chain(rest);
    isolate(chain, rest, lo, hi, exact, irr);
    // Shrink each interval until it contains none of the exact roots, so the
    // merged list is pairwise disjoint with no endpoint at a root.
    for (auto& [a, b] : irr) {
      auto inside = [&](const Rat& r) { return a < r && r < b; };
      bool dirty = true;
      while (dirty) {
        dirty = false;
        for (const Rat& r : exact) {
          if (!inside(r)) continue;
          Rat mid = safe_split(a, b, exact);
          if (rest.eval(a) * rest.eval(mid) < 0)
            b = mid;
          else
            a = mid;
          dirty = true;
        }
      }
    }
  }

  std::vector<std::pair<Rat, Rat>> out;
  for (const Rat& r : exact) out.emplace_back(r, r);
  out.insert(out.end(), irr.begin(), irr.end());
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

std::vector<Rat> gap_points(const std::vector<std::pair<Rat, Rat>>& intervals,
                            const Rat& lo, const Rat& hi) {
  // Virtual degenerate intervals at both ends make every gap the space
  // between two consecutive intervals.
  std::vector<std::pair<Rat, Rat>> ext;
  ext.emplace_back(lo, lo);
  ext.insert(ext.end(), intervals.begin(), intervals.end());
  ext.emplace_back(hi, hi);
  std::vector<Rat> pts;
  for (size_t i = 0; i + 1 < ext.size(); ++i) {
    const Rat& a = ext[i].second;
    const Rat& b = ext[i + 1].first;
    pts.push_back(a < b ? Rat((a + b) / 2) : a);
  }
  return pts;
}

}  // namespace witt
