#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "doctest.h"
#include "witt/matrix.hpp"
#include "witt/padic.hpp"
#include "witt/quadform.hpp"
#include "witt/rational.hpp"

using namespace witt;

namespace {

QMat mat(const std::vector<std::vector<long>>& rows) {
  std::vector<std::vector<Rat>> r;
  for (const auto& row : rows) r.emplace_back(row.begin(), row.end());
  return QMat::from_rows(r);
}

QMat diag_mat(const std::vector<long>& d) {
  QMat m(d.size(), d.size());
  for (size_t i = 0; i < d.size(); ++i) m.at(i, i) = Rat(d[i]);
  return m;
}

QMat sym(const QMat& a) { return a + a.transpose(); }

// Survey used by the cross-checks below; any fixed set of places will do.
const std::vector<Place> kPlaces = {Place::real(), Place::prime(2),
                                    Place::prime(3), Place::prime(5),
                                    Place::prime(7)};

QMat random_symmetric(std::mt19937& rng, size_t n, int bound) {
  std::uniform_int_distribution<int> coef(-bound, bound);
  QMat m(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j) {
      m.at(i, j) = coef(rng);
      m.at(j, i) = m.at(i, j);
    }
  return m;
}

// Product of elementary column operations and sign flips, det = +-1.
QMat random_unimodular(std::mt19937& rng, size_t n) {
  QMat p = QMat::identity(n);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
  std::uniform_int_distribution<int> shear(-2, 2);
  for (size_t step = 0; step < 3 * n; ++step) {
    size_t i = pick(rng), j = pick(rng);
    if (i == j) {
      for (size_t k = 0; k < n; ++k) p.at(k, i) = -p.at(k, i);
      continue;
    }
    Rat c(shear(rng));
    for (size_t k = 0; k < n; ++k) p.at(k, i) += c * p.at(k, j);
  }
  return p;
}

// basis^T s basis must equal diag(entries, 0...) exactly, with squarefree
// nonzero integer entries and an invertible basis.
void check_certificate(const QMat& s, const Diagonalization& d) {
  size_t n = s.rows();
  REQUIRE(d.basis.rows() == n);
  REQUIRE(d.basis.cols() == n);
  REQUIRE(d.entries.size() + d.radical == n);
  QMat rhs(n, n);
  for (size_t i = 0; i < d.entries.size(); ++i) rhs.at(i, i) = Rat(d.entries[i]);
  CHECK(d.basis.transpose() * s * d.basis == rhs);
  CHECK(det(d.basis) != 0);
  for (const Int& e : d.entries) {
    CHECK(e != 0);
    CHECK(squarefree_part(e) == e);
  }
}

void check_witness(const QMat& g, const std::vector<std::vector<Int>>& w,
                   size_t k) {
  REQUIRE(w.size() == k);
  size_t n = g.rows();
  QMat cols(n, k);
  for (size_t j = 0; j < k; ++j) {
    REQUIRE(w[j].size() == n);
    Int gg = 0;
    for (size_t i = 0; i < n; ++i) gg = gcd(gg, w[j][i]);
    CHECK(gg == 1);
    for (size_t i = 0; i < n; ++i) cols.at(i, j) = Rat(w[j][i]);
  }
  CHECK(rank(cols) == k);
  CHECK(cols.transpose() * g * cols == QMat(k, k));
}

// Symmetric reduction with a randomized pivot choice: one chart of diagonal
// values for checking that invariants do not depend on the pivot path.
std::vector<Rat> shuffled_diag(std::mt19937& rng, QMat s) {
  size_t n = s.rows();
  std::vector<char> done(n, 0);
  std::vector<Rat> out;
  for (;;) {
    std::vector<size_t> live;
    for (size_t i = 0; i < n; ++i)
      if (!done[i]) live.push_back(i);
    if (live.empty()) break;
    std::vector<size_t> cand;
    for (size_t i : live)
      if (s.at(i, i) != 0) cand.push_back(i);
    if (cand.empty()) {
      std::vector<std::pair<size_t, size_t>> off;
      for (size_t a = 0; a < live.size(); ++a)
        for (size_t b = a + 1; b < live.size(); ++b)
          if (s.at(live[a], live[b]) != 0) off.emplace_back(live[a], live[b]);
      if (off.empty()) break;  // what is left is the radical
      auto [i, j] = off[rng() % off.size()];
      for (size_t k = 0; k < n; ++k) s.at(i, k) += s.at(j, k);
      for (size_t k = 0; k < n; ++k) s.at(k, i) += s.at(k, j);
      continue;
    }
    size_t piv = cand[rng() % cand.size()];
    Rat d = s.at(piv, piv);
    for (size_t k : live) {
      if (k == piv || s.at(k, piv) == 0) continue;
      Rat r = s.at(k, piv) / d;
      for (size_t m = 0; m < n; ++m) s.at(k, m) -= r * s.at(piv, m);
      for (size_t m = 0; m < n; ++m) s.at(m, k) -= r * s.at(m, piv);
    }
    out.push_back(d);
    done[piv] = 1;
  }
  return out;
}

int hasse_of(const std::vector<Rat>& diag, const Place& v) {
  int h = 1;
  for (size_t i = 0; i < diag.size(); ++i)
    for (size_t j = i + 1; j < diag.size(); ++j) h *= hilbert(diag[i], diag[j], v);
  return h;
}

// The 4x4 Seifert matrix of a three-component 8-crossing link whose
// symmetrized form is anisotropic over Q_2.
QMat l8a15_seifert() {
  return mat({{1, 0, 0, 1}, {0, 1, 0, 1}, {0, 0, 1, 1}, {0, 0, 0, -1}});
}

// 5x5 Seifert matrix of a Montesinos knot with unit determinant.
QMat montesinos_seifert() {
  return mat({{8, 1, 0, 0, 0},
              {1, 0, 0, 0, 0},
              {0, 1, -1, 1, 0},
              {0, 0, 0, -1, 1},
              {0, 0, 0, 0, -1}});
}

// Genus-one Seifert form of the 21/2 rational knot; its symmetrization
// generates a cyclic group of order four in the rational Witt group.
QMat order_four_theta() { return mat({{1, 1}, {0, -5}}); }

// Assemble a matrix from 2x2 blocks.
QMat blocks2(const std::vector<std::vector<QMat>>& b) {
  size_t rb = b.size(), cb = b[0].size();
  QMat m(2 * rb, 2 * cb);
  for (size_t i = 0; i < rb; ++i)
    for (size_t j = 0; j < cb; ++j)
      for (size_t r = 0; r < 2; ++r)
        for (size_t c = 0; c < 2; ++c)
          m.at(2 * i + r, 2 * j + c) = b[i][j].at(r, c);
  return m;
}

}  // namespace

TEST_CASE("symmetric form rejects asymmetry") {
  CHECK_THROWS_AS(SymForm(mat({{0, 1}, {2, 0}})), std::invalid_argument);
  CHECK_NOTHROW(SymForm(mat({{0, 1}, {1, 0}})));
  CHECK(SymForm(QMat(3, 3)).dim() == 3);
}

TEST_CASE("diagonalization produces a squarefree congruence certificate") {
  // Raw reduction of the symmetrized 8-crossing form passes through
  // [2, 2, 2, -7/2]; square scaling turns the last entry into -14.
  QMat q = sym(l8a15_seifert());
  auto d = diagonalize(SymForm(q));
  CHECK(d.entries == std::vector<Int>{2, 2, 2, -14});
  CHECK(d.radical == 0);
  check_certificate(q, d);

  QMat qm = sym(montesinos_seifert());
  auto dm = diagonalize(SymForm(qm));
  CHECK(dm.entries == std::vector<Int>{1, -1, 2, -10, -10});
  CHECK(dm.radical == 0);
  check_certificate(qm, dm);

  auto dz = diagonalize(SymForm(QMat(2, 2)));
  CHECK(dz.entries.empty());
  CHECK(dz.radical == 2);
  check_certificate(QMat(2, 2), dz);

  // Hyperbolic plane: the rank-2 fix produces two entries of opposite
  // square class with discriminant -1 up to squares.
  QMat hyp = mat({{0, 1}, {1, 0}});
  auto dh = diagonalize(SymForm(hyp));
  REQUIRE(dh.entries.size() == 2);
  CHECK(dh.radical == 0);
  CHECK(squarefree_part(Rat(dh.entries[0]) * Rat(dh.entries[1])) == -1);
  check_certificate(hyp, dh);

  std::mt19937 rng(4501);
  for (int iter = 0; iter < 30; ++iter) {
    size_t n = 1 + iter % 5;
    QMat s = random_symmetric(rng, n, 6);
    if (iter % 3 == 2) {
      // Force rank deficiency: replace s by c^T s c with a wide c.
      size_t m = n + 1 + iter % 2;
      QMat c(n, m);
      std::uniform_int_distribution<int> coef(-2, 2);
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) c.at(i, j) = coef(rng);
      s = c.transpose() * s * c;
    }
    auto dd = diagonalize(SymForm(s));
    check_certificate(s, dd);
    CHECK(dd.entries.size() == rank(s));
  }
}

TEST_CASE("hasse symbol of diagonal forms") {
  auto unit = diagonalize(SymForm(diag_mat({1, 1, 1})));
  for (const Place& v : kPlaces) CHECK(hasse(unit, v) == 1);

  // Any two entries of [2, 2, 2, -14] pair to +1 over Q_2.
  auto d8 = diagonalize(SymForm(sym(l8a15_seifert())));
  CHECK(hasse(d8, Place::prime(2)) == 1);

  // Direct sums: eps(q + q') = eps(q) eps(q') (disc q, disc q').
  std::mt19937 rng(4502);
  for (int iter = 0; iter < 20; ++iter) {
    QMat a = random_symmetric(rng, 1 + iter % 3, 5);
    QMat b = random_symmetric(rng, 1 + (iter + 1) % 3, 5);
    auto da = diagonalize(SymForm(a));
    auto db = diagonalize(SymForm(b));
    auto dsum = diagonalize(SymForm(direct_sum(a, b)));
    if (da.entries.empty() || db.entries.empty()) continue;
    Rat pa(1), pb(1);
    for (const Int& e : da.entries) pa *= Rat(e);
    for (const Int& e : db.entries) pb *= Rat(e);
    for (const Place& v : kPlaces)
      CHECK(hasse(dsum, v) == hasse(da, v) * hasse(db, v) * hilbert(pa, pb, v));
  }
}

TEST_CASE("local coindex from the invariant table") {
  auto d8 = diagonalize(SymForm(sym(l8a15_seifert())));
  CHECK(beta_local(d8, Place::prime(2)) == 4);  // anisotropic over Q_2
  CHECK(beta_local(d8, Place::real()) == 2);    // signature
  CHECK(beta_local(d8, Place::prime(7)) == 2);

  auto hyp = diagonalize(SymForm(diag_mat({1, -1})));
  for (const Place& v : kPlaces) CHECK(beta_local(hyp, v) == 0);

  auto tern = diagonalize(SymForm(diag_mat({-1, 3, 5})));
  CHECK(beta_local(tern, Place::real()) == 1);
  CHECK(beta_local(tern, Place::prime(2)) == 1);
  CHECK(beta_local(tern, Place::prime(3)) == 3);
  CHECK(beta_local(tern, Place::prime(5)) == 3);

  // Scaling by any nonzero rational preserves the coindex at every place.
  std::mt19937 rng(4503);
  const std::vector<Rat> scales = {Rat(3), Rat(-5), Rat(1, 2), Rat(-7, 3)};
  for (int iter = 0; iter < 12; ++iter) {
    QMat s = random_symmetric(rng, 2 + iter % 4, 5);
    if (rank(s) < s.rows()) continue;
    auto d0 = diagonalize(SymForm(s));
    auto d1 = diagonalize(SymForm(scales[iter % scales.size()] * s));
    for (const Place& v : kPlaces) CHECK(beta_local(d0, v) == beta_local(d1, v));
  }
}

TEST_CASE("global coindex survey") {
  FormInvariants i8 = beta_global(SymForm(sym(l8a15_seifert())));
  CHECK(i8.beta == 4);
  CHECK(i8.n == 4);
  CHECK(i8.radical == 0);
  CHECK(i8.signature == 2);
  CHECK(i8.disc == -7);
  CHECK(i8.odd_primes == std::vector<Int>{7});

  FormInvariants im = beta_global(SymForm(sym(montesinos_seifert())));
  CHECK(im.beta == 1);
  CHECK(im.radical == 0);
  CHECK(im.signature == -1);
  CHECK(im.disc == -2);

  FormInvariants it = beta_global(SymForm(diag_mat({-1, 3, 5})));
  CHECK(it.beta == 3);
  CHECK(it.odd_primes == std::vector<Int>{3, 5});

  // Definite forms are anisotropic everywhere: beta = n.
  CHECK(beta_global(SymForm(diag_mat({1, 2, 3}))).beta == 3);

  // The radical subtracts: a hyperbolic plane plus two radical lines.
  FormInvariants id = beta_global(SymForm(diag_mat({1, -1, 0, 0})));
  CHECK(id.beta == -2);
  CHECK(id.radical == 2);
  CHECK(id.disc == -1);

  FormInvariants iz = beta_global(SymForm(QMat(3, 3)));
  CHECK(iz.beta == -3);
  CHECK(iz.radical == 3);
  CHECK(iz.disc == 1);

  // The real entry of the survey is the absolute signature.
  for (const auto& [v, b] : i8.beta_at)
    if (v.is_real) CHECK(b == 2);
}

TEST_CASE("coindex invariants under congruence and stabilization") {
  std::mt19937 rng(4504);
  for (int iter = 0; iter < 30; ++iter) {
    size_t n = 2 + iter % 4;
    QMat s = random_symmetric(rng, n, 5);
    QMat p = random_unimodular(rng, n);
    QMat s2 = p.transpose() * s * p;

    FormInvariants a = beta_global(SymForm(s));
    FormInvariants b = beta_global(SymForm(s2));
    CHECK(a.beta == b.beta);
    CHECK(a.radical == b.radical);
    CHECK(a.signature == b.signature);
    CHECK(a.disc == b.disc);

    auto da = diagonalize(SymForm(s));
    auto db = diagonalize(SymForm(s2));
    for (const Place& v : kPlaces) {
      CHECK(hasse(da, v) == hasse(db, v));
      CHECK(beta_local(da, v) == beta_local(db, v));
    }

    // Adding a hyperbolic plane never moves the coindex.
    QMat st = direct_sum(s, mat({{0, 1}, {1, 0}}));
    CHECK(beta_global(SymForm(st)).beta == a.beta);
  }
}

TEST_CASE("coindex parity and signature bounds") {
  std::mt19937 rng(4505);
  for (int iter = 0; iter < 25; ++iter) {
    size_t n = 1 + iter % 5;
    QMat s = random_symmetric(rng, n, 5);
    FormInvariants inv = beta_global(SymForm(s));
    long nd = static_cast<long>(inv.n - inv.radical);
    for (const auto& [v, b] : inv.beta_at) {
      CHECK(b >= 0);
      CHECK(b <= nd);
      CHECK((b - nd) % 2 == 0);
      if (v.is_real) CHECK(b == (inv.signature < 0 ? -inv.signature : inv.signature));
    }
    CHECK(inv.beta + static_cast<long>(inv.radical) >=
          (inv.signature < 0 ? -inv.signature : inv.signature));

    auto w = isotropic_witness(SymForm(s), 6);
    if (w)
      CHECK(inv.beta <= static_cast<long>(inv.n) - 2 * static_cast<long>(w->size()));
  }
}

TEST_CASE("hasse does not depend on the pivot path") {
  std::mt19937 rng(4506);
  for (int iter = 0; iter < 20; ++iter) {
    size_t n = 2 + iter % 4;
    QMat s = random_symmetric(rng, n, 5);
    auto d = diagonalize(SymForm(s));
    std::vector<Rat> chart = shuffled_diag(rng, s);
    REQUIRE(chart.size() == d.entries.size());
    Rat prod(1);
    for (const Rat& x : chart) prod *= x;
    if (!chart.empty()) {
      FormInvariants inv = beta_global(SymForm(s));
      CHECK(squarefree_part(prod) == inv.disc);
    }
    for (const Place& v : kPlaces) CHECK(hasse_of(chart, v) == hasse(d, v));
  }
}

TEST_CASE("isotropic witness pinned searches") {
  // Montesinos symmetrization: a rank-2 totally isotropic subspace exists
  // and certifies beta <= 1.
  QMat qm = sym(montesinos_seifert());
  auto wm = isotropic_witness(SymForm(qm), 3);
  REQUIRE(wm.has_value());
  check_witness(qm, *wm, 2);

  // diag(-2, 6, 10) + [[2,1],[1,-2]]: the span of (1,0,0,1,0) and
  // (1,0,1,0,2) is totally isotropic; the search must find some rank-2
  // witness of its own.
  QMat qt = direct_sum(diag_mat({-2, 6, 10}), mat({{2, 1}, {1, -2}}));
  std::vector<std::vector<Int>> pinned = {{1, 0, 0, 1, 0}, {1, 0, 1, 0, 2}};
  check_witness(qt, pinned, 2);
  auto wt = isotropic_witness(SymForm(qt), 3);
  REQUIRE(wt.has_value());
  check_witness(qt, *wt, 2);

  // Definite forms are skipped outright.
  CHECK(!isotropic_witness(SymForm(diag_mat({1, 1})), 10).has_value());
  CHECK(!isotropic_witness(SymForm(diag_mat({-3, -1, -2})), 10).has_value());

  // Anisotropic over Q_2, hence no witness exists at any height.
  CHECK(!isotropic_witness(SymForm(sym(l8a15_seifert())), 20).has_value());

  // The zero form is its own witness; a hyperbolic plane yields one line.
  auto wz = isotropic_witness(SymForm(QMat(2, 2)), 2);
  REQUIRE(wz.has_value());
  check_witness(QMat(2, 2), *wz, 2);

  QMat hyp = mat({{0, 1}, {1, 0}});
  auto wh = isotropic_witness(SymForm(hyp), 2);
  REQUIRE(wh.has_value());
  check_witness(hyp, *wh, 1);

  auto ws = isotropic_witness(SymForm(diag_mat({1, -1})), 2);
  REQUIRE(ws.has_value());
  check_witness(diag_mat({1, -1}), *ws, 1);
}

TEST_CASE("witness depth matches the coindex defect on small forms") {
  std::mt19937 rng(4507);
  int checked = 0;
  while (checked < 20) {
    size_t n = 2 + static_cast<size_t>(checked) % 3;
    QMat s = random_symmetric(rng, n, 3);
    if (rank(s) < n) continue;
    ++checked;
    FormInvariants inv = beta_global(SymForm(s));
    auto w = isotropic_witness(SymForm(s), 30);
    long k = w ? static_cast<long>(w->size()) : 0;
    CHECK(2 * k == static_cast<long>(n) - inv.beta);
    if (w) check_witness(s, *w, w->size());
  }
}

TEST_CASE("order four form stabilizes to a metabolic sixteen dimensional form") {
  QMat th = order_four_theta();
  QMat eye = QMat::identity(2);
  QMat zero(2, 2);

  // Cabling pattern: three parallel copies of the genus-one surface.
  QMat thj = blocks2({{th, th, th},
                      {th.transpose(), th, th},
                      {th.transpose(), th.transpose(), th}});

  // Change of basis aligning the cable form with the base form plus a
  // metabolic remainder, verified bit for bit.
  QMat p = blocks2({{eye, -eye, -eye}, {-eye, eye, zero}, {eye, zero, eye}});
  QMat skew = th - th.transpose();
  QMat remainder = blocks2({{zero, skew}, {-skew, zero}});
  CHECK(p.transpose() * sym(thj) * p == direct_sum(sym(th), remainder));

  // Two copies of the symmetrized base form are still anisotropic over
  // Q_3, so the class has order four.
  CHECK(beta_global(SymForm(direct_sum(sym(th), sym(th)))).beta == 4);

  // Four copies vanish: the sixteen dimensional sum of two base copies and
  // two cable copies is metabolic, and the greedy search exhibits a full
  // rank-8 totally isotropic subspace.
  QMat theta_l = direct_sum(direct_sum(th, th), direct_sum(thj, thj));
  QMat ql = sym(theta_l);
  FormInvariants inv = beta_global(SymForm(ql));
  CHECK(inv.beta == 0);
  CHECK(inv.radical == 0);
  auto w = isotropic_witness(SymForm(ql), 3);
  REQUIRE(w.has_value());
  check_witness(ql, *w, 8);
}
