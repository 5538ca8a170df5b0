#include "matrix.hpp"

#include <cmath>

#include "error.hpp"

namespace fed3r {

Matrix spd_solve(const Matrix& lhs, const Matrix& rhs) {
  require(lhs.rows() == lhs.cols(), Errc::dimension_mismatch,
          "spd_solve: lhs must be square");
  require(rhs.rows() == lhs.rows(), Errc::dimension_mismatch,
          "spd_solve: rhs row count must match lhs");
  const std::size_t n = lhs.rows();

  // Lower-triangular factor built in place.
  Matrix chol = lhs;
  for (std::size_t j = 0; j < n; ++j) {
    double diag = chol(j, j);
    const double* rj = chol.row(j);
    for (std::size_t k = 0; k < j; ++k) diag -= rj[k] * rj[k];
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      fail(Errc::not_positive_definite,
           "spd_solve: non-positive pivot at column " + std::to_string(j));
    }
    diag = std::sqrt(diag);
    chol(j, j) = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = chol(i, j);
      const double* ri = chol.row(i);
      for (std::size_t k = 0; k < j; ++k) s -= ri[k] * rj[k];
      chol(i, j) = s / diag;
    }
  }

  // Forward then back substitution, one rhs column at a time.
  Matrix x = rhs;
  const std::size_t c_count = rhs.cols();
  for (std::size_t c = 0; c < c_count; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, c);
      const double* ri = chol.row(i);
      for (std::size_t k = 0; k < i; ++k) s -= ri[k] * x(k, c);
      x(i, c) = s / ri[i];
    }
    for (std::size_t ii = n; ii > 0; --ii) {
      const std::size_t i = ii - 1;
      double s = x(i, c);
      for (std::size_t k = i + 1; k < n; ++k) s -= chol(k, i) * x(k, c);
      x(i, c) = s / chol(i, i);
    }
  }
  return x;
}

Matrix gram(const Matrix& z) {
  const std::size_t n = z.rows();
  const std::size_t q = z.cols();
  Matrix a(q, q);
  for (std::size_t i = 0; i < n; ++i) {
    const double* zi = z.row(i);
    for (std::size_t j = 0; j < q; ++j) {
      const double zij = zi[j];
      double* aj = a.row(j);
      for (std::size_t k = j; k < q; ++k) aj[k] += zij * zi[k];
    }
  }
  for (std::size_t j = 0; j < q; ++j) {
    for (std::size_t k = j + 1; k < q; ++k) a(k, j) = a(j, k);
  }
  return a;
}

Matrix cross(const Matrix& z, const Matrix& y) {
  require(z.rows() == y.rows(), Errc::dimension_mismatch,
          "cross: row counts must match");
  const std::size_t n = z.rows();
  const std::size_t q = z.cols();
  const std::size_t c_count = y.cols();
  Matrix b(q, c_count);
  for (std::size_t i = 0; i < n; ++i) {
    const double* zi = z.row(i);
    const double* yi = y.row(i);
    for (std::size_t j = 0; j < q; ++j) {
      const double zij = zi[j];
      double* bj = b.row(j);
      for (std::size_t c = 0; c < c_count; ++c) bj[c] += zij * yi[c];
    }
  }
  return b;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), Errc::dimension_mismatch,
          "matmul: inner dimensions must match");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double* oi = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ai[k];
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) oi[j] += aik * bk[j];
    }
  }
  return out;
}

Matrix add_scaled_identity(Matrix m, double scale) {
  require(m.rows() == m.cols(), Errc::dimension_mismatch,
          "add_scaled_identity: matrix must be square");
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += scale;
  return m;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  const double* p = m.data();
  for (std::size_t i = 0; i < m.size(); ++i) s += p[i] * p[i];
  return std::sqrt(s);
}

double rel_frobenius_diff(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), Errc::dimension_mismatch,
          "rel_frobenius_diff: shapes must match");
  double num = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    num += d * d;
  }
  const double den = frobenius_norm(b);
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num) / den;
}

bool all_finite(const Matrix& m) {
  const double* p = m.data();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!std::isfinite(p[i])) return false;
  }
  return true;
}

}  // namespace fed3r
