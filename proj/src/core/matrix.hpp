#ifndef FED3R_CORE_MATRIX_HPP
#define FED3R_CORE_MATRIX_HPP

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace fed3r {

// Dense row-major matrix of 64-bit floats. The whole solver path runs in
// doubles even though feature files store 32-bit values: accumulating ~1e5
// rank-1 updates loses too much precision at 32 bits.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }
  std::span<const double> row_span(std::size_t r) const {
    return {row(r), cols_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// lhs must be symmetric positive definite. Solves lhs * X = rhs by Cholesky
// factorization; never forms an explicit inverse. Throws
// Errc::not_positive_definite when a pivot is not strictly positive.
Matrix spd_solve(const Matrix& lhs, const Matrix& rhs);

// Z^T Z. Accumulates the upper triangle and mirrors it, so the result is
// symmetric bitwise.
Matrix gram(const Matrix& z);

// Z^T Y for matching row counts.
Matrix cross(const Matrix& z, const Matrix& y);

Matrix matmul(const Matrix& a, const Matrix& b);

Matrix add_scaled_identity(Matrix m, double scale);

double frobenius_norm(const Matrix& m);

// ||a - b||_F / max(||b||_F, tiny); the metric used by the equivalence and
// invariance checks.
double rel_frobenius_diff(const Matrix& a, const Matrix& b);

bool all_finite(const Matrix& m);

}  // namespace fed3r

#endif
