#include "identlink/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "identlink/errors.hpp"

namespace identlink {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vector& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vector matvec(const Matrix& m, const Vector& x) {
  if (m.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
  Vector y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double quad_form(const Matrix& m, const Vector& x) {
  if (m.rows() != x.size() || m.cols() != x.size())
    throw std::invalid_argument("quad_form: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) row += m(i, j) * x[j];
    s += x[i] * row;
  }
  return s;
}

void add_outer(Matrix& m, const Vector& x, double w) {
  if (m.rows() != x.size() || m.cols() != x.size())
    throw std::invalid_argument("add_outer: shape mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    double wxi = w * x[i];
    if (wxi == 0.0) continue;
    for (std::size_t j = 0; j < x.size(); ++j) m(i, j) += wxi * x[j];
  }
}

Matrix cholesky(const Matrix& spd) {
  if (spd.rows() != spd.cols()) throw std::invalid_argument("cholesky: not square");
  const std::size_t n = spd.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = spd(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d))
      throw numerical_error("cholesky: non-positive pivot", static_cast<std::ptrdiff_t>(j));
    double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = spd(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Vector forward_solve(const Matrix& lower, const Vector& b) {
  const std::size_t n = lower.rows();
  if (b.size() != n) throw std::invalid_argument("forward_solve: size mismatch");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= lower(i, j) * y[j];
    y[i] = s / lower(i, i);
  }
  return y;
}

Vector backward_solve_transposed(const Matrix& lower, const Vector& b) {
  const std::size_t n = lower.rows();
  if (b.size() != n) throw std::invalid_argument("backward_solve: size mismatch");
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= lower(j, ii) * x[j];
    x[ii] = s / lower(ii, ii);
  }
  return x;
}

Vector chol_solve(const Matrix& lower, const Vector& b) {
  return backward_solve_transposed(lower, forward_solve(lower, b));
}

}  // namespace identlink
