#include "identlink/link.hpp"

#include <cmath>
#include <stdexcept>

namespace identlink {

namespace {

void require_finite(double xi) {
  if (!std::isfinite(xi)) throw std::domain_error("link: non-finite linear predictor");
}

}  // namespace

LinkValue link_eval(double xi) {
  require_finite(xi);
  double s = std::sqrt(xi * xi + 4.0);
  LinkValue lv;
  lv.xi = xi;
  lv.s = s;
  if (xi >= 0.0) {
    lv.lambda = 0.5 * (xi + s);
    lv.b = 2.0 / lv.lambda;
  } else {
    lv.b = -xi + s;
    lv.lambda = 2.0 / lv.b;
  }
  return lv;
}

double link_lambda(double xi) { return link_eval(xi).lambda; }

double link_lambda_inv(double u) {
  if (!(u > 0.0) || !std::isfinite(u))
    throw std::domain_error("link_lambda_inv: argument must be positive and finite");
  return u - 1.0 / u;
}

double link_b_coeff(double xi) { return link_eval(xi).b; }

}  // namespace identlink
