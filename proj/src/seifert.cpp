#include "witt/seifert.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <utility>

#include "witt/quadform.hpp"
#include "witt/sturm.hpp"

namespace witt {

namespace {

// x = w + conj(w) under the half-angle parametrization.
Rat circle_x(const Rat& s) {
  Rat s2 = s * s;
  return Rat(2) * (Rat(1) - s2) / (Rat(1) + s2);
}

long signature_of(const Diagonalization& d) {
  long sig = 0;
  for (const Int& e : d.entries) sig += sgn(e) > 0 ? 1 : -1;
  return sig;
}

}  // namespace

SeifertMatrix::SeifertMatrix(QMat a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols())
    throw std::invalid_argument("SeifertMatrix: square matrix required");
}

const PolyQ& SeifertMatrix::alexander() const {
  if (!delta_) {
    QMat mt = Rat(-1) * a_.transpose();
    delta_ = normalize_alexander(det_pencil(a_, mt));
  }
  return *delta_;
}

PolyQ alexander(const SeifertMatrix& a) { return a.alexander(); }

SeifertMatrix s_enlarge(const SeifertMatrix& a, const std::vector<Rat>& border,
                        SEnlargeKind kind) {
  const QMat& m = a.matrix();
  const size_t n = m.rows();
  if (border.size() != n)
    throw std::invalid_argument("s_enlarge: border length must match the size");
  QMat b(n + 2, n + 2);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) b.at(i, j) = m.at(i, j);
  if (kind == SEnlargeKind::column) {
    for (size_t i = 0; i < n; ++i) b.at(i, n + 1) = border[i];
    b.at(n + 1, n) = 1;
  } else {
    for (size_t j = 0; j < n; ++j) b.at(n + 1, j) = border[j];
    b.at(n, n + 1) = 1;
  }
  return SeifertMatrix(b);
}

SeifertMatrix make_nonsingular(const SeifertMatrix& sm) {
  if (!sm.admissible() || sm.alexander().eval(Rat(-1)) == 0)
    throw std::invalid_argument(
        "make_nonsingular: the Alexander polynomial must not vanish at -1");
  QMat a = sm.matrix();
  while (a.rows() > 0 && det(a) == 0) {
    const size_t n = a.rows();
    // A 1x1 singular matrix has identically zero pencil, excluded above.
    QMat ker = right_kernel(a);
    std::vector<Rat> z(n);
    for (size_t i = 0; i < n; ++i) z[i] = ker.at(i, 0);
    size_t i0 = 0;
    while (z[i0] == 0) ++i0;

    // Complete z to a determinant-1 basis with z last: standard vectors on
    // the other coordinates, the first of them rescaled to fix det.
    QMat p(n, n);
    size_t col = 0;
    for (size_t j = 0; j < n; ++j)
      if (j != i0) p.at(j, col++) = 1;
    for (size_t i = 0; i < n; ++i) p.at(i, n - 1) = z[i];
    Rat dp = det(p);
    for (size_t i = 0; i < n; ++i) p.at(i, 0) = p.at(i, 0) / dp;
    QMat b = p.transpose() * a * p;
    // Column n-1 of b is P^T A z = 0; its last row is nonzero, else z would
    // span a zero row and column jointly and the pencil determinant would
    // vanish identically.
    const size_t m1 = n - 1;
    bool w_zero = true;
    for (size_t j = 0; j < m1 && w_zero; ++j) w_zero = b.at(m1, j) == 0;
    if (w_zero)
      throw std::logic_error("make_nonsingular: inadmissible kernel vector");

    // Change basis on the first n-1 coordinates so that row n-1 becomes
    // (0, ..., 0, 1, 0).
    QMat wrow(1, m1);
    for (size_t j = 0; j < m1; ++j) wrow.at(0, j) = b.at(m1, j);
    QMat kker = right_kernel(wrow);
    size_t j0 = 0;
    while (wrow.at(0, j0) == 0) ++j0;
    QMat q1(m1, m1);
    for (size_t c = 0; c < kker.cols(); ++c)
      for (size_t i = 0; i < m1; ++i) q1.at(i, c) = kker.at(i, c);
    q1.at(j0, m1 - 1) = Rat(1) / wrow.at(0, j0);
    if (m1 >= 2) {
      Rat dq = det(q1);
      for (size_t i = 0; i < m1; ++i) q1.at(i, 0) = q1.at(i, 0) / dq;
    }
    QMat q(n, n);
    for (size_t i = 0; i < m1; ++i)
      for (size_t j = 0; j < m1; ++j) q.at(i, j) = q1.at(i, j);
    q.at(m1, m1) = 1;
    b = q.transpose() * b * q;

    // Swap the last two coordinates: the zero column moves to position n-2
    // and row n-2 becomes (0, ..., 0, 0, 1).
    QMat pi = QMat::identity(n);
    pi.at(n - 2, n - 2) = 0;
    pi.at(n - 1, n - 1) = 0;
    pi.at(n - 2, n - 1) = 1;
    pi.at(n - 1, n - 2) = 1;
    b = pi.transpose() * b * pi;

    // Shear away the corner entry and the residual last column; adding
    // multiples of coordinate n-2 only touches row entries in column n-1
    // because column n-2 is zero.
    QMat sh = QMat::identity(n);
    sh.at(n - 2, n - 1) = -b.at(n - 1, n - 1);
    for (size_t i = 0; i + 2 < n; ++i) sh.at(n - 2, i) = -b.at(i, n - 1);
    b = sh.transpose() * b * sh;

    QMat next(n - 2, n - 2);
    for (size_t i = 0; i + 2 < n; ++i)
      for (size_t j = 0; j + 2 < n; ++j) next.at(i, j) = b.at(i, j);
    a = next;
  }
  return SeifertMatrix(a);
}

CirclePoint CirclePoint::minus_one() {
  CirclePoint w;
  w.minus_one_ = true;
  return w;
}

CirclePoint CirclePoint::half_angle(Rat s) {
  if (s == 0)
    throw std::domain_error("CirclePoint: s = 0 is the excluded point w = 1");
  CirclePoint w;
  w.s_ = std::move(s);
  return w;
}

const Rat& CirclePoint::s() const {
  if (minus_one_)
    throw std::logic_error("CirclePoint: w = -1 has no half-angle parameter");
  return s_;
}

Rat CirclePoint::real_part_doubled() const {
  return minus_one_ ? Rat(-2) : circle_x(s_);
}

SigNull lt_signature(const SeifertMatrix& sm, const CirclePoint& w) {
  const QMat& a = sm.matrix();
  const size_t n = a.rows();
  QMat sym = a + a.transpose();
  if (w.is_minus_one()) {
    Diagonalization d = diagonalize(SymForm(sym));
    return {signature_of(d), d.radical};
  }
  // (1 - w) A + (1 - conj w) A^T = (2s/(1+s^2)) (s (A + A^T) + i (A^T - A)).
  // The positive scalar is dropped; sgn(s) is reinstated on the signature.
  const Rat& s = w.s();
  QMat sp = s * sym;
  QMat k = a.transpose() - a;
  QMat m(2 * n, 2 * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      m.at(i, j) = sp.at(i, j);
      m.at(n + i, n + j) = sp.at(i, j);
      m.at(i, n + j) = -k.at(i, j);
      m.at(n + i, j) = k.at(i, j);
    }
  // Real doubling of a hermitian matrix: each eigenvalue appears twice.
  Diagonalization d = diagonalize(SymForm(m));
  long sig = signature_of(d) / 2;
  if (s < 0) sig = -sig;
  return {sig, d.radical / 2};
}

namespace {

// Rational s > 0 whose circle point lies on the same root-free arc as the
// target x-value: bisection on s, certified by an empty root isolation of
// the trace polynomial between x(s) and the target.
Rat half_angle_for_x(const PolyQ& tracep, const Rat& target) {
  Rat lo(0), hi(1);
  while (circle_x(hi) >= target) hi = hi * 2;
  for (;;) {
    Rat mid = (lo + hi) / 2;
    Rat xm = circle_x(mid);
    if (xm == target) return mid;
    Rat a = std::min(xm, target), b = std::max(xm, target);
    if (tracep.eval(xm) != 0 && isolate_real_roots(tracep, a, b).empty())
      return mid;
    if (xm > target)
      lo = mid;
    else
      hi = mid;
  }
}

// Largest certified root-free x strictly inside (-2, hi_bound): used when a
// gap point degenerates to an endpoint of the sampling window.
Rat nudge_inward(const PolyQ& tracep, const Rat& from, const Rat& toward) {
  Rat step = (toward - from) / 2;
  for (;;) {
    Rat c = from + step;
    Rat a = std::min(from, c), b = std::max(from, c);
    if (tracep.eval(c) != 0 && isolate_real_roots(tracep, a, b).empty())
      return c;
    step = step / 2;
  }
}

}  // namespace

std::vector<SignatureSample> collect_signature_samples(const SeifertMatrix& sm) {
  const PolyQ& delta = sm.alexander();
  if (delta.is_zero())
    throw std::invalid_argument(
        "collect_signature_samples: zero Alexander polynomial");

  // Roots on the unit circle away from +-1 pair up conjugately and are the
  // roots of the trace polynomial of the (t -+ 1)-free palindromic core in
  // x = t + 1/t, lying in (-2, 2).
  PolyQ core = delta;
  const PolyQ tm1(std::vector<Rat>{Rat(-1), Rat(1)});
  const PolyQ tp1(std::vector<Rat>{Rat(1), Rat(1)});
  while (divides(tm1, core)) core = quo(core, tm1);
  while (divides(tp1, core)) core = quo(core, tp1);
  const bool minus_one_regular = delta.eval(Rat(-1)) != 0;

  PolyQ tracep = trace_poly(core);
  auto intervals = isolate_real_roots(tracep, Rat(-2), Rat(2));
  auto gaps = gap_points(intervals, Rat(-2), Rat(2));

  std::vector<SignatureSample> out;
  if (minus_one_regular) {
    CirclePoint w = CirclePoint::minus_one();
    SigNull sn = lt_signature(sm, w);
    out.push_back({w, sn.signature, sn.nullity});
  }
  for (const Rat& g : gaps) {
    Rat target = g;
    if (target == -2) {
      // The boundary point is w = -1 itself (sampled separately when it is a
      // regular point); the arc sample must move strictly inside.
      Rat toward = intervals.empty() ? Rat(2)
                   : intervals[0].first > Rat(-2) ? intervals[0].first
                                                  : intervals[0].second;
      target = nudge_inward(tracep, Rat(-2), toward);
    } else if (target == 2) {
      // w = 1 is excluded outright; move strictly inside the last arc.
      Rat toward = intervals.empty() ? Rat(-2)
                   : intervals.back().second < Rat(2) ? intervals.back().second
                                                      : intervals.back().first;
      target = nudge_inward(tracep, Rat(2), toward);
    }
    CirclePoint w = CirclePoint::half_angle(half_angle_for_x(tracep, target));
    SigNull sn = lt_signature(sm, w);
    out.push_back({w, sn.signature, sn.nullity});
  }
  std::sort(out.begin(), out.end(),
            [](const SignatureSample& l, const SignatureSample& r) {
              return l.omega.real_part_doubled() < r.omega.real_part_doubled();
            });
  return out;
}

bool signature_function_vanishes(const SeifertMatrix& sm) {
  for (const SignatureSample& s : collect_signature_samples(sm))
    if (s.signature != 0) return false;
  return true;
}

std::size_t components(const SeifertMatrix& sm) {
  QMat skew = sm.matrix() - sm.matrix().transpose();
  return 1 + right_kernel(skew).cols();
}

Rat linking_number(const SeifertMatrix& sm) {
  if (components(sm) != 2)
    throw std::invalid_argument("linking_number: two components required");
  return -sm.alexander().derivative().eval(Rat(1));
}

namespace {

using F2Vec = std::vector<unsigned char>;
using F2Mat = std::vector<F2Vec>;

int form2(const F2Mat& g, const F2Vec& x, const F2Vec& y) {
  int acc = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!x[i]) continue;
    for (size_t j = 0; j < y.size(); ++j) acc ^= g[i][j] & y[j];
  }
  return acc;
}

// Pivot columns and a kernel basis of a symmetric F2 matrix, by one
// row reduction.
void f2_analyze(const F2Mat& g, std::vector<size_t>* pivots,
                std::vector<F2Vec>* kernel) {
  const size_t n = g.size();
  F2Mat w = g;
  std::vector<long> pivot_row_of_col(n, -1);
  size_t r = 0;
  for (size_t c = 0; c < n && r < n; ++c) {
    size_t pr = r;
    while (pr < n && !w[pr][c]) ++pr;
    if (pr == n) continue;
    std::swap(w[pr], w[r]);
    for (size_t i = 0; i < n; ++i)
      if (i != r && w[i][c])
        for (size_t j = 0; j < n; ++j) w[i][j] ^= w[r][j];
    pivot_row_of_col[c] = static_cast<long>(r);
    pivots->push_back(c);
    ++r;
  }
  for (size_t c = 0; c < n; ++c) {
    if (pivot_row_of_col[c] >= 0) continue;
    F2Vec v(n, 0);
    v[c] = 1;
    for (size_t d = 0; d < n; ++d)
      if (pivot_row_of_col[d] >= 0)
        v[d] = w[static_cast<size_t>(pivot_row_of_col[d])][c];
    kernel->push_back(v);
  }
}

}  // namespace

int arf(const SeifertMatrix& sm, std::optional<bool> asserted_proper) {
  const QMat& a = sm.matrix();
  const size_t n = a.rows();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (a.at(i, j).get_den() != 1)
        throw std::invalid_argument("arf: integer Seifert matrix required");

  const size_t mu = components(sm);
  if (asserted_proper.has_value()) {
    if (!*asserted_proper)
      throw inapplicable_error("arf: undefined for a link that is not proper");
  } else if (mu == 2) {
    Rat lk = linking_number(sm);
    if (lk.get_num() % 2 != 0)
      throw inapplicable_error(
          "arf: odd linking number, the two-component link is not proper");
  } else if (mu > 2) {
    throw inapplicable_error(
        "arf: properness is not derivable from the matrix for three or more "
        "components; pass the assertion explicitly");
  }

  F2Mat a2(n, F2Vec(n, 0)), g2(n, F2Vec(n, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      a2[i][j] = a.at(i, j).get_num() % 2 != 0 ? 1 : 0;
      g2[i][j] = a2[i][j];
    }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) g2[i][j] ^= a2[j][i];

  auto quad = [&](const F2Vec& x) { return form2(a2, x, x); };

  std::vector<size_t> pivots;
  std::vector<F2Vec> radical;
  f2_analyze(g2, &pivots, &radical);
  // q restricted to the radical is linear; properness makes it vanish
  // there, which is exactly what makes the Arf invariant well defined.
  for (const F2Vec& rvec : radical)
    if (quad(rvec))
      throw inapplicable_error(
          "arf: the quadratic form does not vanish on the radical, so the "
          "properness assumption fails");

  // The pivot coordinates complement the radical, and the symmetrized form
  // is alternating and nondegenerate there; split off hyperbolic pairs.
  std::vector<F2Vec> basis;
  for (size_t c : pivots) {
    F2Vec e(n, 0);
    e[c] = 1;
    basis.push_back(e);
  }
  int result = 0;
  while (!basis.empty()) {
    F2Vec x = basis.front();
    basis.erase(basis.begin());
    size_t mate = 0;
    while (mate < basis.size() && !form2(g2, x, basis[mate])) ++mate;
    if (mate == basis.size())
      throw std::logic_error("arf: degenerate block in the pivot complement");
    F2Vec y = basis[mate];
    basis.erase(basis.begin() + static_cast<long>(mate));
    for (F2Vec& v : basis) {
      if (form2(g2, v, y))
        for (size_t i = 0; i < n; ++i) v[i] ^= x[i];
      if (form2(g2, v, x))
        for (size_t i = 0; i < n; ++i) v[i] ^= y[i];
    }
    result ^= quad(x) & quad(y);
  }
  return result;
}

}  // namespace witt
