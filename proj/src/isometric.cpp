#include "witt/isometric.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "witt/polyfactor.hpp"
#include "witt/rational.hpp"

namespace witt {

namespace {

PolyQ poly_pow(const PolyQ& f, int e) {
  PolyQ acc(Rat(1));
  for (int i = 0; i < e; ++i) acc *= f;
  return acc;
}

bool is_zero_mat(const QMat& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m.at(i, j) != 0) return false;
  return true;
}

QMat hcat(const QMat& a, const QMat& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  if (a.rows() != b.rows()) throw std::invalid_argument("hcat: row mismatch");
  QMat out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, a.cols() + j) = b.at(i, j);
  }
  return out;
}

// (degree, top-down coefficients): the order factor_q sorts by; used to pick
// the representative of a reversal pair deterministically.
bool poly_less(const PolyQ& a, const PolyQ& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (int i = a.degree(); i >= 0; --i)
    if (a.coeff(i) != b.coeff(i)) return a.coeff(i) < b.coeff(i);
  return false;
}

PolyQ monic_reversal(const PolyQ& d) { return reverse_bar(d).monic(); }

// T restricted to the column span of basis (full column rank, T-invariant
// span). Normal equations are exact over Q.
QMat restrict_to(const QMat& t, const QMat& basis) {
  QMat bt = basis.transpose();
  return inverse(bt * basis) * (bt * (t * basis));
}

long val_int(const Int& n, const Int& p) {
  if (n == 0) throw std::invalid_argument("val_int: zero");
  long v = 0;
  Int m = abs(n);
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

long val_rat(const Rat& r, const Int& p) {
  return val_int(Int(r.get_num()), p) - val_int(Int(r.get_den()), p);
}

Int pow_int(const Int& b, long e) {
  Int acc = 1;
  for (long i = 0; i < e; ++i) acc *= b;
  return acc;
}

Int balanced(Int x, const Int& m) {
  x %= m;
  if (x < 0) x += m;
  if (2 * x > m) x -= m;
  return x;
}

// Residue of a p-integral rational mod p^N, balanced.
Int rat_mod(const Rat& r, const Int& p, long N) {
  Int m = pow_int(p, N);
  Int num(r.get_num()), den(r.get_den());
  Int inv;
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::invalid_argument("rat_mod: denominator not a p-unit");
  return balanced(num * inv, m);
}

PolyQ lift_padic(const PadicPoly& f) {
  Int m = pow_int(f.p, f.N);
  std::vector<Rat> c;
  c.reserve(f.c.size());
  for (const Int& x : f.c) c.emplace_back(balanced(x, m));
  return PolyQ(std::move(c));
}

std::string rat_str(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::string int_str(const Int& n) {
  std::ostringstream os;
  os << n;
  return os.str();
}

}  // namespace

IsoStructure::IsoStructure(QMat q_in, QMat t_in)
    : q(std::move(q_in)), t(std::move(t_in)) {
  if (q.rows() != q.cols() || t.rows() != t.cols() || q.rows() != t.rows())
    throw std::invalid_argument("IsoStructure: size mismatch");
  if (q != q.transpose())
    throw std::invalid_argument("IsoStructure: Q not symmetric");
  if (q.rows() > 0 && det(q) == 0)
    throw std::invalid_argument("IsoStructure: Q singular");
  if (t.transpose() * q * t != q)
    throw std::invalid_argument("IsoStructure: T does not preserve Q");
  delta = det_pencil(QMat::identity(t.rows()), Rat(-1) * t);
}

IsoStructure iso_structure(const SeifertMatrix& a) {
  const QMat& m = a.matrix();
  Rat d = m.rows() ? det(m) : Rat(1);
  if (d == 0)
    throw std::invalid_argument(
        "iso_structure: singular matrix (run make_nonsingular first)");
  IsoStructure s(m + m.transpose(), inverse(m) * m.transpose());
  if (!(a.alexander() == d * s.delta))
    throw std::logic_error("iso_structure: Delta_A != det(A) Delta_T");
  return s;
}

QMat seifert_of(const IsoStructure& s) {
  return s.q * inverse(QMat::identity(s.t.rows()) + s.t);
}

namespace {

// ker d(T)^mult together with the restricted Gram and T.
PrimaryComponent build_component(const IsoStructure& s, const PolyQ& d,
                                 int mult, bool pair) {
  PrimaryComponent c;
  c.delta = d;
  c.multiplicity = mult;
  c.auto_metabolic = pair;
  c.basis = right_kernel(poly_at(poly_pow(d, mult), s.t));
  c.gram = c.basis.transpose() * s.q * c.basis;
  c.t = restrict_to(s.t, c.basis);
  return c;
}

}  // namespace

std::vector<PrimaryComponent> primary_components(const IsoStructure& s) {
  // Factor det(T - tI): a factor's kernel component collects the eigenvalues
  // that are its own roots, which is the convention ker delta(T)^m expects.
  Factorization f = s.t.rows() ? factor_q(charpoly_t(s.t)) : Factorization{};
  std::vector<PrimaryComponent> out;
  std::vector<PolyQ> consumed;
  for (const auto& [d, m] : f.factors) {
    if (std::find(consumed.begin(), consumed.end(), d) != consumed.end())
      continue;
    PolyQ dstar = monic_reversal(d);
    if (dstar == d) {
      PrimaryComponent c = build_component(s, d, m, false);
      if (c.basis.cols() != static_cast<std::size_t>(d.degree() * m))
        throw std::logic_error("primary_components: wrong component size");
      out.push_back(std::move(c));
    } else {
      if (f.multiplicity(dstar) != m)
        throw std::logic_error("primary_components: unpaired factor");
      consumed.push_back(dstar);
      PrimaryComponent a = build_component(s, d, m, true);
      PrimaryComponent b = build_component(s, dstar, m, true);
      PrimaryComponent c;
      c.delta = poly_less(d, dstar) ? d : dstar;
      c.multiplicity = m;
      c.auto_metabolic = true;
      c.basis = hcat(a.basis, b.basis);
      c.gram = c.basis.transpose() * s.q * c.basis;
      c.t = restrict_to(s.t, c.basis);
      out.push_back(std::move(c));
    }
  }
  // Distinct components are orthogonal summand by summand.
  std::size_t total = 0;
  for (const auto& c : out) total += c.basis.cols();
  if (total != s.dim())
    throw std::logic_error("primary_components: components do not fill V");
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (!is_zero_mat(out[i].basis.transpose() * s.q * out[j].basis))
        throw std::logic_error("primary_components: components not orthogonal");
    }
    if (!out[i].auto_metabolic && out[i].basis.cols() > 0 &&
        det(out[i].gram) == 0)
      throw std::logic_error("primary_components: degenerate restriction");
  }
  return out;
}

PrimaryComponent reduce_to_minimal_polynomial(const PrimaryComponent& input) {
  if (input.auto_metabolic)
    throw std::invalid_argument(
        "reduce_to_minimal_polynomial: symmetric components only");
  PrimaryComponent c = input;
  for (;;) {
    std::size_t n = c.gram.rows();
    if (n == 0) return c;
    QMat dt = poly_at(c.delta, c.t);
    // Minimal exponent a with delta(T)^a = 0 on the component.
    int a = 1;
    QMat prev = dt;  // delta(T)^a
    while (!is_zero_mat(prev)) {
      prev = prev * dt;
      if (++a > static_cast<int>(n) + 1)
        throw std::logic_error("reduce_to_minimal_polynomial: not nilpotent");
    }
    if (a == 1) return c;
    // W = delta(T)^{a-1} V is isotropic; the form descends to W-perp / W.
    QMat pw = poly_at(poly_pow(c.delta, a - 1), c.t);
    QMat w = select_columns(pw, pivot_columns(pw));
    if (!is_zero_mat(w.transpose() * c.gram * w))
      throw std::logic_error("reduce_to_minimal_polynomial: W not isotropic");
    QMat perp = right_kernel(w.transpose() * c.gram);
    // Complement of W inside W-perp: the perp columns that stay independent.
    QMat u = hcat(w, perp);
    QMat comp(n, 0);
    for (std::size_t j : pivot_columns(u)) {
      if (j < w.cols()) continue;
      QMat col(n, 1);
      for (std::size_t i = 0; i < n; ++i) col.at(i, 0) = u.at(i, j);
      comp = hcat(comp, col);
    }
    QMat span = hcat(w, comp);
    // T(comp) lies in W-perp = span(w, comp); take the comp-coordinates.
    QMat bt = span.transpose();
    QMat coords = inverse(bt * span) * (bt * (c.t * comp));
    QMat tnew(comp.cols(), comp.cols());
    for (std::size_t i = 0; i < comp.cols(); ++i)
      for (std::size_t j = 0; j < comp.cols(); ++j)
        tnew.at(i, j) = coords.at(w.cols() + i, j);
    c.basis = c.basis * comp;
    c.gram = comp.transpose() * c.gram * comp;
    c.t = tnew;
    c.multiplicity = c.delta.degree()
                         ? static_cast<int>(c.gram.rows()) / c.delta.degree()
                         : 0;
    if (c.gram.rows() > 0 && det(c.gram) == 0)
      throw std::logic_error("reduce_to_minimal_polynomial: degenerate step");
  }
}

// ---------------------------------------------------------------------------
// p-adic components

namespace {

// Reversal-partner relation between monic mod-p^N factors. With the
// substitutions u = p^{g.shift} t and u = p^{h.shift} t in force on the two
// models, h is the monic reversal of g as a factor over Q_p iff
//   h(u) g(0) = sum_i g_i (p^{g.shift + h.shift})^i u^{d-i},
// an identity free of divisions. g is symmetric iff it is its own partner.
bool is_partner(const PadicPoly& g, const PadicPoly& h, const Int& p, long N) {
  if (g.degree() != h.degree()) return false;
  Int m = pow_int(p, N);
  Int ss = pow_int(p, g.shift + h.shift);
  int d = g.degree();
  for (int k = 0; k <= d; ++k) {
    // coefficient of u^k on both sides
    Int lhs = balanced(h.c[static_cast<std::size_t>(k)] * g.c[0], m);
    Int rhs = balanced(
        g.c[static_cast<std::size_t>(d - k)] * pow_int(ss, d - k), m);
    if (lhs != rhs) return false;
  }
  return true;
}

// Exact integer matrix congruent mod p^N to p^scale * r; throws
// precision_error if no scale <= cap makes the entries p-integral.
std::vector<std::vector<Int>> scaled_mod(const QMat& r, const Int& p, long N,
                                         long scale) {
  std::vector<std::vector<Int>> out(r.rows(), std::vector<Int>(r.cols()));
  Rat ps(pow_int(p, scale));
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j)
      out[i][j] = rat_mod(ps * r.at(i, j), p, N);
  return out;
}

// Smallest k >= 0 with p^k m p-integral.
long denominator_scale(const QMat& m, const Int& p) {
  long k = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m.at(i, j) != 0) k = std::max(k, -val_rat(m.at(i, j), p));
  return k;
}

// Kernel of the true component map g(p^shift T)^mult, certified mod p^*.
PadicKernel component_kernel(const IsoStructure& s, const PadicPoly& g,
                             int mult, const Int& p, long N) {
  QMat teval = Rat(pow_int(p, g.shift)) * s.t;
  QMat r = poly_at(poly_pow(lift_padic(g), mult), teval);
  long w = denominator_scale(r, p);
  PadicKernel k = kernel_mod_pN(scaled_mod(r, p, N, w), p, N);
  std::size_t want = static_cast<std::size_t>(g.degree() * mult);
  if (k.basis.size() != want)
    throw precision_error("component kernel has unexpected rank", N);
  return k;
}

struct PadicGram {
  std::vector<std::vector<Int>> gram;
  long scale = 0;      // stored gram = p^scale * true gram
  long certified = 0;  // entries valid mod p^certified
};

PadicGram restricted_gram(const IsoStructure& s, const PadicKernel& k,
                          const Int& p) {
  std::size_t dim = k.basis.size();
  QMat b(s.dim(), dim);
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i < s.dim(); ++i)
      b.at(i, j) = Rat(k.basis[j][i]);
  QMat g = b.transpose() * s.q * b;
  PadicGram out;
  out.scale = denominator_scale(s.q, p);
  out.certified = k.certified - out.scale;
  if (out.certified < 4)
    throw precision_error("restricted gram lost too much precision",
                          out.certified);
  out.gram = scaled_mod(g, p, out.certified, out.scale);
  return out;
}

}  // namespace

std::vector<PadicComponent> primary_components(const IsoStructure& s,
                                               const Int& p, long N) {
  std::vector<PadicComponent> out;
  if (s.dim() == 0) return out;
  Factorization f = factor_q(charpoly_t(s.t));
  for (const auto& [dq, m] : f.factors) {
    // Only process each rational reversal class once; the refinement of the
    // partner polynomial mirrors this one.
    PolyQ dstar = monic_reversal(dq);
    if (poly_less(dstar, dq)) continue;
    if (dstar == dq) {
      PadicFactorization pf = factor_qp(dq, p, N);
      std::vector<bool> used(pf.factors.size(), false);
      for (std::size_t i = 0; i < pf.factors.size(); ++i) {
        if (used[i]) continue;
        const PadicPoly& g = pf.factors[i];
        std::vector<std::size_t> partners;
        for (std::size_t j = i; j < pf.factors.size(); ++j)
          if (!used[j] && is_partner(g, pf.factors[j], p, N))
            partners.push_back(j);
        if (partners.size() != 1)
          throw precision_error("ambiguous reversal pairing of local factors",
                                N);
        std::size_t j = partners[0];
        used[i] = used[j] = true;
        PadicComponent c;
        c.delta = g;
        c.multiplicity = m;
        c.auto_metabolic = j != i;
        PadicKernel ka = component_kernel(s, g, m, p, N);
        if (j != i) {
          PadicKernel kb = component_kernel(s, pf.factors[j], m, p, N);
          ka.certified = std::min(ka.certified, kb.certified);
          for (auto& v : kb.basis) ka.basis.push_back(v);
        }
        PadicGram pg = restricted_gram(s, ka, p);
        c.basis = std::move(ka.basis);
        c.gram = std::move(pg.gram);
        c.gram_scale = pg.scale;
        c.certified = std::min(ka.certified, pg.certified);
        out.push_back(std::move(c));
      }
    } else {
      // Rational reversal pair: every local factor of dq partners with one
      // of dstar (the two are coprime), giving metabolic components.
      PadicFactorization pfa = factor_qp(dq, p, N);
      PadicFactorization pfb = factor_qp(dstar, p, N);
      std::vector<bool> used(pfb.factors.size(), false);
      for (const PadicPoly& g : pfa.factors) {
        std::vector<std::size_t> partners;
        for (std::size_t j = 0; j < pfb.factors.size(); ++j)
          if (!used[j] && is_partner(g, pfb.factors[j], p, N))
            partners.push_back(j);
        if (partners.size() != 1)
          throw precision_error("ambiguous reversal pairing of local factors",
                                N);
        used[partners[0]] = true;
        PadicComponent c;
        c.delta = g;
        c.multiplicity = m;
        c.auto_metabolic = true;
        PadicKernel ka = component_kernel(s, g, m, p, N);
        PadicKernel kb =
            component_kernel(s, pfb.factors[partners[0]], m, p, N);
        ka.certified = std::min(ka.certified, kb.certified);
        for (auto& v : kb.basis) ka.basis.push_back(v);
        PadicGram pg = restricted_gram(s, ka, p);
        c.basis = std::move(ka.basis);
        c.gram = std::move(pg.gram);
        c.gram_scale = pg.scale;
        c.certified = std::min(ka.certified, pg.certified);
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standard coindex-one matrices

SeifertMatrix std_coindex_one(const PolyQ& p) {
  if (p.is_zero() || p.degree() < 1 || p.degree() % 2 == 0)
    throw std::invalid_argument("std_coindex_one: odd degree required");
  if (p.coeff(0) == 0)
    throw std::invalid_argument("std_coindex_one: P(0) = 0");
  if (symmetry_type(p) != Symmetry::antipalindromic)
    throw std::invalid_argument("std_coindex_one: P must be antipalindromic");
  int n = (p.degree() - 1) / 2;
  std::size_t dim = static_cast<std::size_t>(2 * n + 1);
  // [[0, M_{n+1}^T], [M_n, 0]] from the low coefficients c_0..c_n of P.
  QMat binv(dim, dim);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= i; ++j)
      binv.at(static_cast<std::size_t>(i), static_cast<std::size_t>(n + j)) =
          p.coeff(i - j);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      binv.at(static_cast<std::size_t>(n + 1 + i), static_cast<std::size_t>(j)) =
          p.coeff(j - i);
  QMat a = inverse(binv);

  // Companion matrix of P in the basis 1, t, ..., t^{2n}.
  QMat comp(dim, dim);
  for (std::size_t j = 0; j + 1 < dim; ++j) comp.at(j + 1, j) = 1;
  for (std::size_t i = 0; i < dim; ++i)
    comp.at(i, dim - 1) = p.coeff(static_cast<int>(i)) / p.coeff(0);
  if (!(inverse(a) * a.transpose() == comp))
    throw std::logic_error("std_coindex_one: monodromy is not the companion");

  SeifertMatrix out(a);
  Rat c0 = p.coeff(0);
  Rat scale = 1;
  for (int i = 0; i < 2 * (n + 1); ++i) scale /= c0;
  if (!(out.alexander() == scale * p))
    throw std::logic_error("std_coindex_one: Delta check failed");
  return out;
}

// ---------------------------------------------------------------------------
// Decision engine

namespace {

struct Side {
  std::string label;
  SeifertMatrix mat;
  IsoStructure iso;

  Side(std::string l, SeifertMatrix m, IsoStructure i)
      : label(std::move(l)), mat(std::move(m)), iso(std::move(i)) {}
};

struct FactorEntry {
  PolyQ delta;
  bool symmetric = false;
  std::vector<int> mult;  // per side
  int total = 0;
};

// Witt invariants of one side's local component, exact square-class
// representatives included.
struct LocalSide {
  std::size_t dim = 0;
  std::vector<Int> reps;  // p^(v mod 2) * unit, one per diagonal entry
  int hasse = 1;
  Int disc = 1;
};

Diagonalization as_diag(const std::vector<Int>& reps) {
  Diagonalization d;
  d.entries = reps;
  d.radical = 0;
  d.basis = QMat::identity(reps.size());
  return d;
}

// Diagonal of one side's d-component over Q_p reduced to square-class
// representatives; enforces the valuation margins before trusting them.
LocalSide local_component_side(const IsoStructure& iso, const PadicPoly& g,
                               int mult, const Int& p, long N) {
  PadicKernel k = component_kernel(iso, g, mult, p, N);
  PadicGram pg = restricted_gram(iso, k, p);
  PadicDiagonal d = diagonalize_mod_pN(pg.gram, p, pg.certified);
  LocalSide out;
  out.dim = d.diag.size();
  long floor_margin = p == 2 ? 3 : 1;
  for (const Int& e : d.diag) {
    if (e == 0)
      throw precision_error("vanishing diagonal entry in local component",
                            d.certified);
    long v = val_int(e, p);
    if (2 * v >= d.certified || d.certified - v < floor_margin)
      throw precision_error("diagonal entry too deep for its certificate",
                            d.certified);
    long vt = v - pg.scale;  // true valuation before the p^scale clearing
    Int unit = e / pow_int(p, v);
    Int rep = ((vt % 2) + 2) % 2 == 1 ? p * unit : unit;
    out.reps.push_back(rep);
  }
  Diagonalization dd = as_diag(out.reps);
  out.hasse = hasse(dd, Place::prime(p));
  Int prod = 1;
  for (const Int& r : out.reps) prod *= r;
  out.disc = squarefree_part(prod);
  return out;
}

bool total_is_even(const std::vector<Side>& sides) {
  std::size_t n = 0;
  for (const auto& s : sides) n += s.mat.size();
  return n % 2 == 0;
}

DecisionOutcome run_engine(
    const std::vector<std::pair<std::string, SeifertMatrix>>& inputs,
    const EngineOptions& opt, std::vector<std::string> trail) {
  DecisionOutcome out;
  out.trail = std::move(trail);

  for (const auto& [label, sm] : inputs) {
    if (!sm.admissible()) {
      out.verdict = DecisionOutcome::Verdict::inapplicable;
      out.note = "Delta = 0 for " + label + ": outside the decidable class";
      return out;
    }
    if (sm.alexander().eval(Rat(-1)) == 0) {
      out.verdict = DecisionOutcome::Verdict::inapplicable;
      out.note = "Delta(-1) = 0 for " + label + ": the engine requires a "
                 "nonsingular symmetrized form";
      return out;
    }
  }

  // Nonsingular models, empty collapses dropped.
  std::vector<Side> sides;
  for (const auto& [label, sm] : inputs) {
    SeifertMatrix ns = make_nonsingular(sm);
    out.trail.push_back(label + ": nonsingular model of size " +
                        std::to_string(ns.size()) + " (from " +
                        std::to_string(sm.size()) + ")");
    if (ns.size() > 0)
      sides.emplace_back(label, ns, iso_structure(ns));
  }
  if (sides.empty()) {
    out.verdict = DecisionOutcome::Verdict::yes;
    out.trail.push_back("every side collapsed to the empty matrix");
    return out;
  }
  if (!total_is_even(sides))
    throw std::logic_error("engine: odd total dimension");

  // Step 1: the signature function over the circle.
  QMat m = sides[0].mat.matrix();
  for (std::size_t i = 1; i < sides.size(); ++i)
    m = direct_sum(m, sides[i].mat.matrix());
  SeifertMatrix sum(m);
  auto samples = collect_signature_samples(sum);
  bool vanish = true;
  for (const auto& sample : samples) {
    if (sample.signature == 0) continue;
    vanish = false;
    Obstruction ob;
    ob.step = "signature";
    ob.place = Place::real();
    ob.detail = "signature " + std::to_string(sample.signature) +
                " at the circle point with 2 Re(omega) = " +
                rat_str(sample.omega.real_part_doubled());
    ob.data = {{"signature", std::to_string(sample.signature)},
               {"two_re_omega", rat_str(sample.omega.real_part_doubled())}};
    out.obstructions.push_back(std::move(ob));
    break;
  }
  if (!vanish) {
    out.verdict = DecisionOutcome::Verdict::no;
    if (!opt.all_obstructions) return out;
  } else {
    out.trail.push_back("signature function vanishes (" +
                        std::to_string(samples.size()) + " arc samples)");
  }

  // Step 2: factor the characteristic polynomial per side and merge.
  std::vector<FactorEntry> entries;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    Factorization f = factor_q(charpoly_t(sides[i].iso.t));
    for (const auto& [d, mult] : f.factors) {
      auto it = std::find_if(entries.begin(), entries.end(),
                             [&](const FactorEntry& e) { return e.delta == d; });
      if (it == entries.end()) {
        FactorEntry e;
        e.delta = d;
        e.symmetric = monic_reversal(d) == d;
        e.mult.assign(sides.size(), 0);
        entries.push_back(std::move(e));
        it = entries.end() - 1;
      }
      it->mult[i] = mult;
      it->total += mult;
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const FactorEntry& a, const FactorEntry& b) {
              return poly_less(a.delta, b.delta);
            });

  bool parity_ok = true;
  for (const auto& e : entries) {
    if (!e.symmetric || e.total % 2 == 0) continue;
    parity_ok = false;
    Obstruction ob;
    ob.step = "factor-parity";
    ob.factor = poly_to_string(e.delta);
    ob.detail = "symmetric irreducible factor " + ob.factor +
                " has odd total multiplicity " + std::to_string(e.total);
    ob.data = {{"factor", ob.factor},
               {"multiplicity", std::to_string(e.total)}};
    out.obstructions.push_back(std::move(ob));
    if (!opt.all_obstructions) break;
  }
  if (!parity_ok) {
    out.verdict = DecisionOutcome::Verdict::no;
    if (!opt.all_obstructions) return out;
  } else {
    out.trail.push_back(
        "every symmetric irreducible factor has even total multiplicity");
  }

  // Step 3: the (t-1)-component, handled over Q by Levine's reduction.
  PolyQ tm1(std::vector<Rat>{Rat(-1), Rat(1)});
  const FactorEntry* e1 = nullptr;
  for (const auto& e : entries)
    if (e.delta == tm1) e1 = &e;
  if (e1 != nullptr) {
    QMat combined(0, 0);
    std::vector<std::pair<std::string, std::string>> data;
    for (std::size_t i = 0; i < sides.size(); ++i) {
      if (e1->mult[i] == 0) continue;
      PrimaryComponent c =
          build_component(sides[i].iso, tm1, e1->mult[i], false);
      PrimaryComponent r = reduce_to_minimal_polynomial(c);
      if (r.gram.rows() == 0) {
        data.emplace_back(sides[i].label + ".reduced", "metabolic");
        continue;
      }
      Diagonalization dg = diagonalize(SymForm(r.gram));
      std::string diag;
      for (const Int& x : dg.entries)
        diag += (diag.empty() ? "" : ", ") + int_str(x);
      data.emplace_back(sides[i].label + ".reduced", "diag(" + diag + ")");
      combined = direct_sum(combined, r.gram);
    }
    if (combined.rows() > 0) {
      FormInvariants inv = beta_global(SymForm(combined));
      if (inv.beta != 0) {
        Obstruction ob;
        ob.step = "t-minus-1";
        ob.factor = "t - 1";
        ob.detail = "reduced (t-1)-component has Witt coindex " +
                    std::to_string(inv.beta) + " over Q";
        ob.data = std::move(data);
        ob.data.emplace_back("beta", std::to_string(inv.beta));
        ob.data.emplace_back("disc", int_str(inv.disc));
        out.obstructions.push_back(std::move(ob));
        out.verdict = DecisionOutcome::Verdict::no;
        if (!opt.all_obstructions) return out;
      } else {
        out.trail.push_back("(t-1)-component is Witt trivial over Q");
      }
    } else {
      out.trail.push_back("(t-1)-component reduced to nothing on every side");
    }
  }

  // Step 4: the surviving symmetric factors and their prime survey.
  std::vector<const FactorEntry*> deltas;
  for (const auto& e : entries)
    if (e.symmetric && !(e.delta == tm1)) deltas.push_back(&e);

  if (deltas.empty()) {
    out.trail.push_back("no symmetric factors besides t - 1; no local tests");
    if (out.verdict != DecisionOutcome::Verdict::no)
      out.verdict = DecisionOutcome::Verdict::yes;
    return out;
  }

  std::vector<Int> primes;
  if (!opt.primes.empty()) {
    primes = opt.primes;
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    out.trail.push_back("local survey primes supplied by the caller");
  } else {
    // Scale the symmetric non-(t-1) part to an integer matrix M'' and
    // survey 2 together with the primes of det(M'') Disc(product of deltas).
    QMat mprime(0, 0);
    for (const auto* e : deltas) {
      for (std::size_t i = 0; i < sides.size(); ++i) {
        if (e->mult[i] == 0) continue;
        PrimaryComponent c =
            build_component(sides[i].iso, e->delta, e->mult[i], false);
        mprime = direct_sum(
            mprime, c.gram * inverse(QMat::identity(c.t.rows()) + c.t));
      }
    }
    Int den = 1;
    for (std::size_t i = 0; i < mprime.rows(); ++i)
      for (std::size_t j = 0; j < mprime.cols(); ++j)
        den = lcm(den, Int(mprime.at(i, j).get_den()));
    Rat dd = det(Rat(den) * mprime);
    if (dd == 0) throw std::logic_error("engine: singular M'");
    PolyQ prod(Rat(1));
    for (const auto* e : deltas) prod *= e->delta;
    Rat disc = discriminant(primitive_part(prod));
    Int dnum = Int(dd.get_num()) * Int(disc.get_num());
    primes.push_back(2);
    for (const auto& [q, mult] : factor_integer(dnum))
      if (q != 2) primes.push_back(q);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    std::string plist;
    for (const Int& q : primes) plist += (plist.empty() ? "" : ", ") + int_str(q);
    out.trail.push_back("local survey primes: " + plist);
  }

  // Step 5: local Witt tests, with doubling on precision shortfalls.
  for (const Int& p : primes) {
    bool prime_done = false;
    for (long n = opt.padic_start; n <= opt.padic_limit && !prime_done;
         n *= 2) {
      try {
        std::vector<Obstruction> found;
        for (const auto* e : deltas) {
          PadicFactorization pf = factor_qp(e->delta, p, n);
          std::vector<bool> used(pf.factors.size(), false);
          for (std::size_t i = 0; i < pf.factors.size(); ++i) {
            if (used[i]) continue;
            const PadicPoly& g = pf.factors[i];
            std::vector<std::size_t> partners;
            for (std::size_t j = i; j < pf.factors.size(); ++j)
              if (!used[j] && is_partner(g, pf.factors[j], p, n))
                partners.push_back(j);
            if (partners.size() != 1)
              throw precision_error("ambiguous reversal pairing", n);
            used[i] = used[partners[0]] = true;
            if (partners[0] != i) continue;  // reversal pair: metabolic
            // Symmetric local factor: compare the sides' Witt classes.
            std::vector<Int> all_reps;
            std::vector<std::pair<std::string, std::string>> data;
            for (std::size_t si = 0; si < sides.size(); ++si) {
              if (e->mult[si] == 0) continue;
              LocalSide ls = local_component_side(sides[si].iso, g,
                                                  e->mult[si], p, n);
              all_reps.insert(all_reps.end(), ls.reps.begin(), ls.reps.end());
              const std::string& l = sides[si].label;
              data.emplace_back(l + ".dim", std::to_string(ls.dim));
              std::string reps;
              for (const Int& r : ls.reps)
                reps += (reps.empty() ? "" : ", ") + int_str(r);
              data.emplace_back(l + ".diag", reps);
              data.emplace_back(l + ".disc", int_str(ls.disc));
              data.emplace_back(l + ".hasse", std::to_string(ls.hasse));
            }
            long beta = beta_local(as_diag(all_reps), Place::prime(p));
            if (beta != 0) {
              Obstruction ob;
              ob.step = "local";
              ob.place = Place::prime(p);
              ob.factor = g.str();
              ob.detail = "component of " + g.str() + " (mod " + int_str(p) +
                          "^" + std::to_string(n) + ") has Witt coindex " +
                          std::to_string(beta) + " over " +
                          Place::prime(p).label();
              ob.data = std::move(data);
              ob.data.emplace_back("prime", int_str(p));
              ob.data.emplace_back("factor", g.str());
              ob.data.emplace_back("precision", std::to_string(n));
              ob.data.emplace_back("beta", std::to_string(beta));
              found.push_back(std::move(ob));
              if (!opt.all_obstructions) break;
            }
          }
          if (!found.empty() && !opt.all_obstructions) break;
        }
        for (auto& ob : found) out.obstructions.push_back(std::move(ob));
        if (!found.empty()) {
          out.verdict = DecisionOutcome::Verdict::no;
          if (!opt.all_obstructions) return out;
        } else {
          out.trail.push_back("Witt trivial over " + Place::prime(p).label());
        }
        prime_done = true;
      } catch (const precision_error&) {
        if (2 * n > opt.padic_limit) {
          out.verdict = DecisionOutcome::Verdict::inapplicable;
          out.note = "p-adic precision exhausted at p = " + int_str(p);
          return out;
        }
      } catch (const budget_error&) {
        if (2 * n > opt.padic_limit) {
          out.verdict = DecisionOutcome::Verdict::inapplicable;
          out.note = "local factorization budget exhausted at p = " +
                     int_str(p);
          return out;
        }
      }
    }
    if (!prime_done &&
        out.verdict != DecisionOutcome::Verdict::inapplicable) {
      out.verdict = DecisionOutcome::Verdict::inapplicable;
      out.note = "p-adic precision exhausted at p = " + int_str(p);
      return out;
    }
  }

  if (out.obstructions.empty())
    out.verdict = DecisionOutcome::Verdict::yes;
  else
    out.verdict = DecisionOutcome::Verdict::no;
  return out;
}

}  // namespace

DecisionOutcome is_metabolic(const SeifertMatrix& a, const EngineOptions& opt) {
  if (a.size() % 2 != 0)
    throw std::invalid_argument("is_metabolic: even dimension required");
  return run_engine({{"form", a}}, opt, {});
}

DecisionOutcome is_coindex_one(const SeifertMatrix& a,
                               const EngineOptions& opt) {
  if (a.size() % 2 == 0)
    throw std::invalid_argument("is_coindex_one: odd dimension required");
  DecisionOutcome out;
  if (!a.admissible()) {
    out.verdict = DecisionOutcome::Verdict::inapplicable;
    out.note = "Delta = 0: outside the decidable class";
    return out;
  }
  if (a.alexander().eval(Rat(-1)) == 0) {
    out.verdict = DecisionOutcome::Verdict::inapplicable;
    out.note = "Delta(-1) = 0: the standard comparison is not defined";
    return out;
  }
  // The standard matrix wants Delta of full degree with nonzero constant
  // term, which the nonsingular model provides (odd size is preserved:
  // stabilization moves change size by two).
  SeifertMatrix ns = make_nonsingular(a);
  SeifertMatrix std_mat = std_coindex_one(ns.alexander());
  std::vector<std::string> trail = {
      "standard comparison matrix of size " + std::to_string(std_mat.size()) +
      " built from Delta"};
  return run_engine({{"form", ns}, {"std", SeifertMatrix(-std_mat.matrix())}},
                    opt, std::move(trail));
}

DecisionOutcome concordant(const SeifertMatrix& a, const SeifertMatrix& b,
                           const EngineOptions& opt) {
  if (a.size() % 2 != b.size() % 2) {
    DecisionOutcome out;
    out.verdict = DecisionOutcome::Verdict::inapplicable;
    out.note = "size parity mismatch";
    return out;
  }
  return run_engine({{"left", a}, {"right", SeifertMatrix(-b.matrix())}}, opt,
                    {});
}

}  // namespace witt
