#ifndef IDENTLINK_LINK_HPP
#define IDENTLINK_LINK_HPP

namespace identlink {

// The link function
//
//   lambda(xi) = (xi + sqrt(xi^2 + 4)) / 2 = 2 / (-xi + sqrt(xi^2 + 4)),
//
// the inverse of u -> u - 1/u on (0, inf).  It is monotonically
// increasing, behaves like xi for large positive xi and like 1/|xi|
// for large negative xi.
//
// The Gibbs samplers repeatedly need, for a single linear predictor xi,
// the bundle of quantities
//
//   lambda = lambda(xi),
//   b      = -xi + sqrt(xi^2 + 4) = 2 / lambda   (the gamma rate),
//   s      = sqrt(xi^2 + 4)                      (the IG rate scale),
//
// which link_eval computes once so that they stay mutually consistent.
// Each half-line uses the algebraic form without subtractive
// cancellation: (xi + s)/2 for xi >= 0 and 2/(-xi + s) for xi < 0.

struct LinkValue {
  double xi;      // linear predictor
  double lambda;  // lambda(xi) > 0
  double b;       // 2 / lambda > 0
  double s;       // sqrt(xi^2 + 4) >= 2
};

LinkValue link_eval(double xi);

// lambda(xi); domain error on non-finite input.
double link_lambda(double xi);

// The inverse map u -> u - 1/u; domain error unless u > 0.
double link_lambda_inv(double u);

// b(xi) = -xi + sqrt(xi^2 + 4), evaluated without cancellation.
double link_b_coeff(double xi);

}  // namespace identlink

#endif  // IDENTLINK_LINK_HPP
