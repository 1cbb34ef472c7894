#include "identlink/linalg.hpp"

#include <cmath>

#include "doctest.h"
#include "identlink/errors.hpp"

using namespace identlink;

TEST_CASE("cholesky reproduces the matrix") {
  Matrix a(3, 3);
  double vals[3][3] = {{4.0, 1.0, 0.5}, {1.0, 3.0, -0.2}, {0.5, -0.2, 2.0}};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) a(i, j) = vals[i][j];
  Matrix l = cholesky(a);
  Matrix back = matmul(l, transpose(l));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(back(i, j) == doctest::Approx(a(i, j)).epsilon(1e-12));
}

TEST_CASE("cholesky failure carries the pivot index") {
  Matrix a = Matrix::identity(3);
  a(2, 2) = -1.0;
  try {
    cholesky(a);
    FAIL("expected numerical_error");
  } catch (const numerical_error& e) {
    CHECK(e.index() == 2);
  }
}

TEST_CASE("chol_solve solves SPD systems") {
  Matrix a(2, 2);
  a(0, 0) = 4.0;
  a(0, 1) = a(1, 0) = 1.0;
  a(1, 1) = 3.0;
  Vector b{1.0, 2.0};
  Vector x = chol_solve(cholesky(a), b);
  Vector ax = matvec(a, x);
  CHECK(ax[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ax[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("quad_form and add_outer agree with direct evaluation") {
  Matrix m = Matrix::identity(2);
  Vector x{1.0, -2.0};
  add_outer(m, x, 0.5);  // m = I + 0.5 x x'
  CHECK(m(0, 0) == doctest::Approx(1.5));
  CHECK(m(0, 1) == doctest::Approx(-1.0));
  CHECK(m(1, 1) == doctest::Approx(3.0));
  Vector y{2.0, 1.0};
  // y' m y = 1.5*4 + 2*(-1)*2 + 3*1
  CHECK(quad_form(m, y) == doctest::Approx(6.0 - 4.0 + 3.0));
}
