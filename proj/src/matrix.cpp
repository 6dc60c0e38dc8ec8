#include "witt/matrix.hpp"

#include <stdexcept>
#include <utility>

namespace witt {

QMat QMat::identity(size_t n) {
  QMat m(n, n);
  for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

QMat QMat::from_rows(const std::vector<std::vector<Rat>>& rows) {
  if (rows.empty()) return QMat();
  QMat m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_)
      throw std::invalid_argument("ragged matrix rows");
    for (size_t j = 0; j < m.cols_; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

QMat QMat::transpose() const {
  QMat m(cols_, rows_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j) m.at(j, i) = at(i, j);
  return m;
}

bool QMat::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = i + 1; j < cols_; ++j)
      if (at(i, j) != at(j, i)) return false;
  return true;
}

QMat QMat::operator-() const {
  QMat m = *this;
  for (auto& x : m.a_) x = -x;
  return m;
}

QMat& QMat::operator+=(const QMat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("matrix shape mismatch");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

QMat& QMat::operator-=(const QMat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("matrix shape mismatch");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

QMat operator+(QMat a, const QMat& b) { return a += b; }
QMat operator-(QMat a, const QMat& b) { return a -= b; }

QMat operator*(const QMat& a, const QMat& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix shape mismatch");
  QMat m(a.rows(), b.cols());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t k = 0; k < a.cols(); ++k) {
      if (a.at(i, k) == 0) continue;
      for (size_t j = 0; j < b.cols(); ++j)
        m.at(i, j) += a.at(i, k) * b.at(k, j);
    }
  return m;
}

QMat operator*(const Rat& s, QMat a) {
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j) a.at(i, j) *= s;
  return a;
}

namespace {

// Row echelon form in place; returns (pivot column list, det sign flips).
// Rows below each pivot are cleared; pivot rows are not normalized.
std::vector<size_t> echelon(QMat& m, int* swaps = nullptr) {
  std::vector<size_t> pivots;
  size_t row = 0;
  if (swaps) *swaps = 0;
  for (size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    size_t p = row;
    while (p < m.rows() && m.at(p, col) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != row) {
      for (size_t j = 0; j < m.cols(); ++j) std::swap(m.at(p, j), m.at(row, j));
      if (swaps) ++*swaps;
    }
    for (size_t r = row + 1; r < m.rows(); ++r) {
      if (m.at(r, col) == 0) continue;
      Rat f = m.at(r, col) / m.at(row, col);
      for (size_t j = col; j < m.cols(); ++j) m.at(r, j) -= f * m.at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

Rat det(const QMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("det of non-square");
  if (m.rows() == 0) return 1;
  QMat w = m;
  int swaps = 0;
  auto pivots = echelon(w, &swaps);
  if (pivots.size() < m.rows()) return 0;
  Rat d = swaps % 2 ? -1 : 1;
  for (size_t i = 0; i < m.rows(); ++i) d *= w.at(i, i);
  return d;
}

size_t rank(const QMat& m) {
  if (m.empty()) return 0;
  QMat w = m;
  return echelon(w).size();
}

QMat inverse(const QMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square");
  size_t n = m.rows();
  // Gauss-Jordan on [m | I].
  QMat w(n, 2 * n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) w.at(i, j) = m.at(i, j);
    w.at(i, n + i) = 1;
  }
  for (size_t col = 0; col < n; ++col) {
    size_t p = col;
    while (p < n && w.at(p, col) == 0) ++p;
    if (p == n) throw std::invalid_argument("inverse of singular matrix");
    if (p != col)
      for (size_t j = 0; j < 2 * n; ++j) std::swap(w.at(p, j), w.at(col, j));
    Rat piv = w.at(col, col);
    for (size_t j = 0; j < 2 * n; ++j) w.at(col, j) /= piv;
    for (size_t r = 0; r < n; ++r) {
      if (r == col || w.at(r, col) == 0) continue;
      Rat f = w.at(r, col);
      for (size_t j = 0; j < 2 * n; ++j) w.at(r, j) -= f * w.at(col, j);
    }
  }
  QMat inv(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) inv.at(i, j) = w.at(i, n + j);
  return inv;
}

QMat direct_sum(const QMat& a, const QMat& b) {
  QMat m(a.rows() + b.rows(), a.cols() + b.cols());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j) m.at(i, j) = a.at(i, j);
  for (size_t i = 0; i < b.rows(); ++i)
    for (size_t j = 0; j < b.cols(); ++j)
      m.at(a.rows() + i, a.cols() + j) = b.at(i, j);
  return m;
}

QMat right_kernel(const QMat& m) {
  QMat w = m;
  auto pivots = echelon(w);
  // Back-substitute one free column at a time.
  std::vector<bool> is_pivot(m.cols(), false);
  for (size_t c : pivots) is_pivot[c] = true;
  size_t dim = m.cols() - pivots.size();
  QMat ker(m.cols(), dim);
  size_t out = 0;
  for (size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rat> v(m.cols());
    v[free] = 1;
    for (size_t r = pivots.size(); r-- > 0;) {
      size_t pc = pivots[r];
      if (pc > free) continue;
      Rat s = 0;
      for (size_t j = pc + 1; j < m.cols(); ++j) s += w.at(r, j) * v[j];
      v[pc] = -s / w.at(r, pc);
    }
    for (size_t i = 0; i < m.cols(); ++i) ker.at(i, out) = v[i];
    ++out;
  }
  return ker;
}

std::vector<size_t> pivot_columns(const QMat& m) {
  QMat w = m;
  return echelon(w);
}

QMat select_columns(const QMat& m, const std::vector<size_t>& idx) {
  QMat r(m.rows(), idx.size());
  for (size_t j = 0; j < idx.size(); ++j)
    for (size_t i = 0; i < m.rows(); ++i) r.at(i, j) = m.at(i, idx[j]);
  return r;
}

QMat poly_at(const PolyQ& p, const QMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("poly_at non-square");
  size_t n = m.rows();
  QMat r(n, n);
  for (size_t i = p.coeffs().size(); i-- > 0;) {
    r = r * m;
    Rat c = p.coeffs()[i];
    for (size_t d = 0; d < n; ++d) r.at(d, d) += c;
  }
  return r;
}

PolyQ poly_det(const std::vector<std::vector<PolyQ>>& entries) {
  size_t n = entries.size();
  if (n == 0) return PolyQ(Rat(1));
  for (const auto& row : entries)
    if (row.size() != n) throw std::invalid_argument("poly_det non-square");
  // Degree bound: sum over rows of the largest entry degree.
  size_t bound = 0;
  for (const auto& row : entries) {
    int best = -1;
    for (const auto& e : row)
      if (!e.is_zero() && e.degree() > best) best = e.degree();
    if (best < 0) return PolyQ();  // a zero row
    bound += static_cast<size_t>(best);
  }
  std::vector<Rat> xs(bound + 1), ys(bound + 1);
  for (size_t k = 0; k <= bound; ++k) {
    xs[k] = Rat(k);
    QMat e(n, n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) e.at(i, j) = entries[i][j].eval(xs[k]);
    ys[k] = det(e);
  }
  // Lagrange interpolation.
  PolyQ acc;
  for (size_t k = 0; k <= bound; ++k) {
    PolyQ term(ys[k]);
    if (ys[k] == 0) continue;
    for (size_t j = 0; j <= bound; ++j) {
      if (j == k) continue;
      term = term * PolyQ(std::vector<Rat>{-xs[j], 1});
      term *= Rat(1) / (xs[k] - xs[j]);
    }
    acc += term;
  }
  return acc;
}

PolyQ det_pencil(const QMat& m0, const QMat& m1) {
  if (m0.rows() != m0.cols() || m1.rows() != m1.cols() ||
      m0.rows() != m1.rows())
    throw std::invalid_argument("det_pencil shape mismatch");
  size_t n = m0.rows();
  std::vector<std::vector<PolyQ>> entries(n, std::vector<PolyQ>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      entries[i][j] =
          PolyQ(std::vector<Rat>{m0.at(i, j), m1.at(i, j)});
  return poly_det(entries);
}

PolyQ charpoly_t(const QMat& t) {
  return det_pencil(t, -QMat::identity(t.rows()));
}

}  // namespace witt
