#include "identlink/link.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "identlink/rng.hpp"

using namespace identlink;

TEST_CASE("lambda at reference points") {
  CHECK(link_lambda(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(link_lambda(1.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(link_lambda(-1.5) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("lambda against a long-double oracle at extreme arguments") {
  // oracle: evaluate (xi + sqrt(xi^2 + 4)) / 2 in 80-bit extended
  // precision; for negative arguments the formula cancels even in
  // extended precision, so use the exact reflection lambda(-x) = 1/lambda(x)
  auto oracle = [](double xi) {
    long double x = std::abs(xi);
    long double pos = (x + std::sqrt(x * x + 4.0L)) / 2.0L;
    return static_cast<double>(xi >= 0.0 ? pos : 1.0L / pos);
  };
  for (double xi : {1e9, 1e6, 12345.678, -12345.678, -1e6, -1e9}) {
    double got = link_lambda(xi);
    double want = oracle(xi);
    CHECK(std::abs(got - want) / want <= 1e-12);
  }
  // 1e9 maps to 1e9 + 1e-9
  CHECK(link_lambda(1e9) == doctest::Approx(1e9 + 1e-9).epsilon(1e-12));
}

TEST_CASE("lambda_inv reference points and round trip") {
  CHECK(link_lambda_inv(1.0) == 0.0);
  CHECK(link_lambda_inv(2.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(link_lambda_inv(0.5) == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK_THROWS_AS(link_lambda_inv(0.0), std::domain_error);
  CHECK_THROWS_AS(link_lambda_inv(-1.0), std::domain_error);

  // log-spaced grid u in [1e-8, 1e8]
  for (int k = -80; k <= 80; ++k) {
    double u = std::pow(10.0, k / 10.0);
    double back = link_lambda(link_lambda_inv(u));
    CHECK(std::abs(back - u) / u <= 1e-10);
  }
}

TEST_CASE("b coefficient reference points and consistency") {
  CHECK(link_b_coeff(0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(link_b_coeff(1.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(link_b_coeff(-1.5) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(link_b_coeff(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(link_lambda(INFINITY), std::domain_error);
}

TEST_CASE("link bundle identities over a log-spaced grid") {
  for (int k = -80; k <= 80; ++k) {
    double mag = std::pow(10.0, k / 10.0);
    for (double xi : {mag, -mag}) {
      LinkValue lv = link_eval(xi);
      CHECK(lv.lambda > 0.0);
      CHECK(lv.b > 0.0);
      CHECK(lv.s >= 2.0);
      // lambda * b = 2
      CHECK(std::abs(lv.lambda * lv.b - 2.0) / 2.0 <= 1e-12);
      // reciprocal symmetry lambda(xi) lambda(-xi) = 1
      CHECK(std::abs(lv.lambda * link_lambda(-xi) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("s^2 - xi^2 = 4, evaluated without cancellation") {
  // s^2 - xi^2 = (s - xi)(s + xi) = b(xi) b(-xi); each factor is the
  // half-line's cancellation-free form, so the product carries the
  // identity at full precision
  for (double xi : {0.0, 0.5, -3.0, 1e3, -1e3, 1e6, -1e6}) {
    double diff = link_b_coeff(xi) * link_b_coeff(-xi);
    CHECK(std::abs(diff - 4.0) / 4.0 <= 1e-9);
    CHECK(link_eval(xi).s == link_eval(-xi).s);
  }
}

TEST_CASE("monotonicity on random pairs") {
  RngStream rng(20250808, 0);
  for (int t = 0; t < 2000; ++t) {
    double a = 50.0 * (rng.uniform() - 0.5) * std::exp(6.0 * (rng.uniform() - 0.5));
    double b = 50.0 * (rng.uniform() - 0.5) * std::exp(6.0 * (rng.uniform() - 0.5));
    if (a == b) continue;
    double lo = std::min(a, b), hi = std::max(a, b);
    CHECK(link_lambda(lo) < link_lambda(hi));
  }
}

TEST_CASE("asymptotics at +-1e6") {
  CHECK(std::abs(link_lambda(1e6) / 1e6 - 1.0) <= 1e-5);
  CHECK(std::abs(link_lambda(-1e6) * 1e6 - 1.0) <= 1e-5);
}
