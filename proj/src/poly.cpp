#include "witt/poly.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace witt {

PolyQ::PolyQ(const Rat& constant) {
  if (constant != 0) c_.push_back(constant);
}

PolyQ::PolyQ(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }

PolyQ PolyQ::t() { return PolyQ(std::vector<Rat>{0, 1}); }

void PolyQ::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

int PolyQ::degree() const {
  if (c_.empty()) throw std::logic_error("degree of zero polynomial");
  return static_cast<int>(c_.size()) - 1;
}

Rat PolyQ::coeff(int i) const {
  if (i < 0) throw std::invalid_argument("negative coefficient index");
  return i < static_cast<int>(c_.size()) ? c_[i] : Rat(0);
}

Rat PolyQ::lc() const {
  if (c_.empty()) throw std::logic_error("lc of zero polynomial");
  return c_.back();
}

PolyQ PolyQ::operator-() const {
  PolyQ r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

PolyQ& PolyQ::operator+=(const PolyQ& o) {
  if (c_.size() < o.c_.size()) c_.resize(o.c_.size());
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

PolyQ& PolyQ::operator-=(const PolyQ& o) {
  if (c_.size() < o.c_.size()) c_.resize(o.c_.size());
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

PolyQ& PolyQ::operator*=(const PolyQ& o) {
  *this = *this * o;
  return *this;
}

PolyQ& PolyQ::operator*=(const Rat& s) {
  if (s == 0) {
    c_.clear();
    return *this;
  }
  for (auto& x : c_) x *= s;
  return *this;
}

Rat PolyQ::eval(const Rat& x) const {
  Rat r = 0;
  for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
  return r;
}

PolyQ PolyQ::derivative() const {
  if (c_.size() <= 1) return PolyQ();
  std::vector<Rat> d(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = Rat(i) * c_[i];
  return PolyQ(std::move(d));
}

PolyQ PolyQ::monic() const {
  PolyQ r = *this;
  Rat l = lc();
  for (auto& x : r.c_) x /= l;
  return r;
}

PolyQ PolyQ::shifted(int k) const {
  if (k < 0) throw std::invalid_argument("negative shift");
  if (c_.empty()) return PolyQ();
  std::vector<Rat> r(c_.size() + k);
  for (size_t i = 0; i < c_.size(); ++i) r[i + k] = c_[i];
  return PolyQ(std::move(r));
}

PolyQ PolyQ::reversed() const {
  return PolyQ(std::vector<Rat>(c_.rbegin(), c_.rend()));
}

bool PolyQ::is_integral() const {
  for (const auto& x : c_)
    if (x.get_den() != 1) return false;
  return true;
}

PolyQ operator+(PolyQ a, const PolyQ& b) { return a += b; }
PolyQ operator-(PolyQ a, const PolyQ& b) { return a -= b; }

PolyQ operator*(const PolyQ& a, const PolyQ& b) {
  if (a.is_zero() || b.is_zero()) return PolyQ();
  const auto& ac = a.coeffs();
  const auto& bc = b.coeffs();
  std::vector<Rat> r(ac.size() + bc.size() - 1);
  for (size_t i = 0; i < ac.size(); ++i)
    for (size_t j = 0; j < bc.size(); ++j) r[i + j] += ac[i] * bc[j];
  return PolyQ(std::move(r));
}

PolyQ operator*(const Rat& s, PolyQ a) { return a *= s; }

std::pair<PolyQ, PolyQ> divrem(const PolyQ& a, const PolyQ& b) {
  if (b.is_zero()) throw std::invalid_argument("division by zero polynomial");
  if (a.is_zero() || a.degree() < b.degree()) return {PolyQ(), a};
  std::vector<Rat> r = a.coeffs();
  int db = b.degree();
  Rat lb = b.lc();
  std::vector<Rat> q(a.degree() - db + 1);
  for (int i = a.degree(); i >= db; --i) {
    if (r[i] == 0) continue;
    Rat f = r[i] / lb;
    q[i - db] = f;
    for (int j = 0; j <= db; ++j) r[i - db + j] -= f * b.coeff(j);
  }
  return {PolyQ(std::move(q)), PolyQ(std::move(r))};
}

PolyQ quo(const PolyQ& a, const PolyQ& b) { return divrem(a, b).first; }
PolyQ rem(const PolyQ& a, const PolyQ& b) { return divrem(a, b).second; }

bool divides(const PolyQ& d, const PolyQ& a) {
  if (d.is_zero()) return a.is_zero();
  return rem(a, d).is_zero();
}

PolyQ gcd_monic(PolyQ a, PolyQ b) {
  while (!b.is_zero()) {
    PolyQ r = rem(a, b);
    a = std::move(b);
    b = r.is_zero() ? PolyQ() : r.monic();
  }
  return a.is_zero() ? a : a.monic();
}

PolyQ compose(const PolyQ& p, const PolyQ& q) {
  PolyQ r;
  for (size_t i = p.coeffs().size(); i-- > 0;)
    r = r * q + PolyQ(p.coeffs()[i]);
  return r;
}

Rat content(const PolyQ& p) {
  if (p.is_zero()) throw std::invalid_argument("content of zero polynomial");
  Int den = 1;
  for (const auto& x : p.coeffs()) den = lcm(den, Int(x.get_den()));
  Int g = 0;
  for (const auto& x : p.coeffs()) g = gcd(g, Int(x.get_num() * den / x.get_den()));
  if (p.lc() < 0) g = -g;
  Rat c(g, den);
  c.canonicalize();
  return c;
}

PolyQ primitive_part(const PolyQ& p) {
  Rat c = content(p);
  PolyQ r = p;
  r *= Rat(1) / c;
  return r;
}

PolyQ reverse_bar(const PolyQ& f) {
  if (f.is_zero()) throw std::invalid_argument("reverse_bar of zero");
  return f.reversed();
}

PolyQ normalize_alexander(const PolyQ& raw) {
  if (raw.is_zero()) return raw;
  size_t k = 0;
  while (raw.coeffs()[k] == 0) ++k;
  std::vector<Rat> c(raw.coeffs().begin() + k, raw.coeffs().end());
  return PolyQ(std::move(c));
}

Symmetry symmetry_type(const PolyQ& p) {
  if (p.is_zero() || p.coeff(0) == 0)
    throw std::invalid_argument("symmetry_type needs a nonzero constant term");
  PolyQ r = p.reversed();
  if (r == p) return Symmetry::palindromic;
  if (r == -p) return Symmetry::antipalindromic;
  return Symmetry::none;
}

namespace {

// Determinant of a dense rational matrix by Gaussian elimination.
Rat dense_det(std::vector<std::vector<Rat>> m) {
  size_t n = m.size();
  Rat det = 1;
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (size_t row = col + 1; row < n; ++row) {
      if (m[row][col] == 0) continue;
      Rat f = m[row][col] / m[col][col];
      for (size_t j = col; j < n; ++j) m[row][j] -= f * m[col][j];
    }
  }
  return det;
}

}  // namespace

Rat resultant(const PolyQ& a, const PolyQ& b) {
  if (a.is_zero() || b.is_zero())
    throw std::invalid_argument("resultant with zero argument");
  int m = a.degree(), n = b.degree();
  if (m == 0 && n == 0) return 1;
  if (m == 0) {
    Rat r = 1;
    for (int i = 0; i < n; ++i) r *= a.lc();
    return r;
  }
  if (n == 0) {
    Rat r = 1;
    for (int i = 0; i < m; ++i) r *= b.lc();
    return r;
  }
  // Sylvester matrix: n shifted copies of a's coefficients, then m of b's.
  size_t size = m + n;
  std::vector<std::vector<Rat>> s(size, std::vector<Rat>(size, Rat(0)));
  for (int row = 0; row < n; ++row)
    for (int j = 0; j <= m; ++j) s[row][row + j] = a.coeff(m - j);
  for (int row = 0; row < m; ++row)
    for (int j = 0; j <= n; ++j) s[n + row][row + j] = b.coeff(n - j);
  return dense_det(std::move(s));
}

Rat discriminant(const PolyQ& p) {
  int d = p.degree();
  if (d < 1) throw std::invalid_argument("discriminant needs degree >= 1");
  if (d == 1) return 1;
  Rat sign = (Int(d) * (d - 1) / 2) % 2 == 0 ? 1 : -1;
  return sign * resultant(p, p.derivative()) / p.lc();
}

PolyQ trace_poly(const PolyQ& p) {
  if (symmetry_type(p) != Symmetry::palindromic || p.degree() % 2 != 0)
    throw std::invalid_argument("trace_poly needs an even palindromic input");
  int d = p.degree() / 2;
  PolyQ x = PolyQ::t();
  PolyQ ck_prev(Rat(2));  // C_0
  PolyQ ck = x;           // C_1
  PolyQ s(p.coeff(d));
  for (int k = 1; k <= d; ++k) {
    s += p.coeff(d + k) * ck;
    PolyQ next = x * ck - ck_prev;
    ck_prev = std::move(ck);
    ck = std::move(next);
  }
  return s;
}

std::string poly_to_string(const PolyQ& p, const std::string& var) {
  if (p.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (int i = p.degree(); i >= 0; --i) {
    Rat c = p.coeff(i);
    if (c == 0) continue;
    if (first) {
      if (c < 0) out << "-";
      first = false;
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    Rat a = abs(c);
    if (i == 0) {
      out << a.get_str();
    } else {
      if (a != 1) out << a.get_str() << "*";
      out << var;
      if (i > 1) out << "^" << i;
    }
  }
  return out.str();
}

PolyQ poly_from_string(const std::string& s, const std::string& var) {
  std::string t;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t.empty()) throw std::invalid_argument("empty polynomial string");

  std::vector<Rat> coeffs;
  size_t i = 0;
  auto bad = [&] { throw std::invalid_argument("malformed polynomial: " + s); };
  while (i < t.size()) {
    int sign = 1;
    if (t[i] == '+' || t[i] == '-') {
      if (t[i] == '-') sign = -1;
      ++i;
    } else if (i > 0) {
      bad();
    }
    Rat coef = 1;
    bool saw_coef = false;
    size_t start = i;
    while (i < t.size() && (std::isdigit(static_cast<unsigned char>(t[i])) || t[i] == '/'))
      ++i;
    if (i > start) {
      coef = rat_from_string(t.substr(start, i - start));
      saw_coef = true;
    }
    if (i < t.size() && t[i] == '*') {
      if (!saw_coef) bad();
      ++i;
    }
    int power = 0;
    if (t.compare(i, var.size(), var) == 0) {
      i += var.size();
      power = 1;
      if (i < t.size() && t[i] == '^') {
        ++i;
        size_t es = i;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
        if (i == es) bad();
        power = std::stoi(t.substr(es, i - es));
      }
    } else if (!saw_coef) {
      bad();
    }
    if (static_cast<size_t>(power) >= coeffs.size()) coeffs.resize(power + 1);
    coeffs[power] += Rat(sign) * coef;
  }
  return PolyQ(std::move(coeffs));
}

}  // namespace witt
