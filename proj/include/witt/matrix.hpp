#pragma once

#include <vector>

#include "witt/poly.hpp"
#include "witt/rational.hpp"

namespace witt {

// Dense rational matrix, row-major.
class QMat {
 public:
  QMat() : rows_(0), cols_(0) {}
  QMat(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static QMat identity(size_t n);
  static QMat from_rows(const std::vector<std::vector<Rat>>& rows);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Rat& at(size_t i, size_t j) { return a_[i * cols_ + j]; }
  const Rat& at(size_t i, size_t j) const { return a_[i * cols_ + j]; }

  QMat transpose() const;
  bool is_symmetric() const;

  bool operator==(const QMat& o) const = default;

  QMat operator-() const;
  QMat& operator+=(const QMat& o);
  QMat& operator-=(const QMat& o);

 private:
  size_t rows_, cols_;
  std::vector<Rat> a_;
};

QMat operator+(QMat a, const QMat& b);
QMat operator-(QMat a, const QMat& b);
QMat operator*(const QMat& a, const QMat& b);
QMat operator*(const Rat& s, QMat a);

Rat det(const QMat& m);              // square input
size_t rank(const QMat& m);
QMat inverse(const QMat& m);         // throws std::invalid_argument if singular
QMat direct_sum(const QMat& a, const QMat& b);

// Columns spanning the right kernel (empty matrix when trivial).
QMat right_kernel(const QMat& m);

// Indices of the leftmost independent columns, ascending.
std::vector<size_t> pivot_columns(const QMat& m);
QMat select_columns(const QMat& m, const std::vector<size_t>& idx);

// P(M) for square M, by Horner.
QMat poly_at(const PolyQ& p, const QMat& m);

// Exact determinant of a square array of polynomials: evaluate at enough
// rational points to pin the degree down, then interpolate.
PolyQ poly_det(const std::vector<std::vector<PolyQ>>& entries);

// det(M0 + t * M1) through poly_det.
PolyQ det_pencil(const QMat& m0, const QMat& m1);

// det(T - t*I).
PolyQ charpoly_t(const QMat& t);

}  // namespace witt
