#ifndef IDENTLINK_LINALG_HPP
#define IDENTLINK_LINALG_HPP

#include <cstddef>
#include <vector>

namespace identlink {

using Vector = std::vector<double>;

// Small dense row-major matrix.  The regression problems handled here
// have p of order 10, so no BLAS backend is needed; everything is
// written out directly.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  const double* data() const { return a_.data(); }
  double* data() { return a_.data(); }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_, cols_;
  std::vector<double> a_;
};

Matrix transpose(const Matrix& m);
Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& m, const Vector& x);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);

// A quadratic form x' M x; M must be square with dimension x.size().
double quad_form(const Matrix& m, const Vector& x);

// Adds w * x x' to m (symmetric rank-one update).
void add_outer(Matrix& m, const Vector& x, double w);

// Lower-triangular Cholesky factor of a symmetric positive definite
// matrix.  Throws numerical_error carrying the failing pivot index if
// the matrix is not SPD (within floating point).
Matrix cholesky(const Matrix& spd);

// Solve L y = b and L' x = y for lower-triangular L.
Vector forward_solve(const Matrix& lower, const Vector& b);
Vector backward_solve_transposed(const Matrix& lower, const Vector& b);

// Solve (L L') x = b given the Cholesky factor.
Vector chol_solve(const Matrix& lower, const Vector& b);

}  // namespace identlink

#endif  // IDENTLINK_LINALG_HPP
