#include "identlink/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "identlink/errors.hpp"

namespace identlink {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error(std::string(what) + " must be positive and finite");
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), cached_normal_(0.0), have_cached_(false) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  gen_.seed(seq);
}

double RngStream::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double RngStream::normal() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_normal_;
  }
  double a, b, r2;
  do {
    a = 2.0 * uniform() - 1.0;
    b = 2.0 * uniform() - 1.0;
    r2 = a * a + b * b;
  } while (r2 >= 1.0 || r2 == 0.0);
  double f = std::sqrt(-2.0 * std::log(r2) / r2);
  cached_normal_ = b * f;
  have_cached_ = true;
  return a * f;
}

double sample_gamma(RngStream& rng, double shape, double rate) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  if (shape < 1.0) {
    // boost: Ga(shape) = Ga(shape + 1) * U^(1/shape)
    double u = rng.uniform_pos();
    return sample_gamma(rng, shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = rng.uniform_pos();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double sample_inverse_gaussian(RngStream& rng, double mu, double lam) {
  require_positive(mu, "inverse Gaussian mu");
  require_positive(lam, "inverse Gaussian lambda");
  double z = rng.normal();
  double y = z * z;
  // Smaller root x = mu * f written with the cancellation moved into
  // sqrt(w (4 lam + w)), which stays accurate for mu near underflow.
  double w = mu * y;
  double f = 1.0 + (w - std::sqrt(w * (4.0 * lam + w))) / (2.0 * lam);
  if (!(f > 0.0)) f = std::numeric_limits<double>::min();
  double u = rng.uniform();
  if (u < 1.0 / (1.0 + f)) return mu * f;
  return mu / f;
}

double sample_levy(RngStream& rng) {
  double z;
  do {
    z = rng.normal();
  } while (z == 0.0);
  return 1.0 / (z * z);
}

std::pair<double, double> verify_ig_identity(RngStream& rng, double kappa,
                                             std::size_t n_draws) {
  require_positive(kappa, "kappa");
  if (n_draws < 10000) throw std::domain_error("verify_ig_identity: need at least 1e4 draws");
  double sum = 0.0, sumsq = 0.0;
  double half_k2 = 0.5 * kappa * kappa;
  for (std::size_t i = 0; i < n_draws; ++i) {
    double zeta = sample_levy(rng);
    double x = std::exp(-half_k2 * zeta);
    sum += x;
    sumsq += x * x;
  }
  double n = static_cast<double>(n_draws);
  double mean = sum / n;
  double var = (sumsq - n * mean * mean) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

namespace {

// Knuth, exact for small means.
std::int64_t poisson_knuth(RngStream& rng, double mean) {
  double limit = std::exp(-mean);
  double prod = rng.uniform_pos();
  std::int64_t k = 0;
  while (prod > limit) {
    prod *= rng.uniform_pos();
    ++k;
  }
  return k;
}

// Hormann's PTRS transformed rejection, valid for mean >= 10.
std::int64_t poisson_ptrs(RngStream& rng, double mean) {
  double log_mean = std::log(mean);
  double b = 0.931 + 2.53 * std::sqrt(mean);
  double a = -0.059 + 0.02483 * b;
  double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = rng.uniform() - 0.5;
    double v = rng.uniform_pos();
    double us = 0.5 - std::abs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        kf * log_mean - mean - std::lgamma(kf + 1.0))
      return static_cast<std::int64_t>(kf);
  }
}

}  // namespace

std::int64_t sample_poisson(RngStream& rng, double mean) {
  require_positive(mean, "poisson mean");
  if (mean < 10.0) return poisson_knuth(rng, mean);
  return poisson_ptrs(rng, mean);
}

std::vector<std::int64_t> sample_multinomial(RngStream& rng, std::int64_t trials,
                                             const Vector& probs) {
  if (trials < 0) throw std::domain_error("multinomial trials must be non-negative");
  if (probs.empty()) throw std::domain_error("multinomial needs at least one category");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::domain_error("multinomial probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::domain_error("multinomial probabilities must sum to 1");
  std::vector<std::int64_t> counts(probs.size(), 0);
  for (std::int64_t t = 0; t < trials; ++t) {
    double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t k = probs.size() - 1;  // absorb rounding into the last bin
    for (std::size_t j = 0; j < probs.size(); ++j) {
      acc += probs[j];
      if (u < acc) {
        k = j;
        break;
      }
    }
    ++counts[k];
  }
  return counts;
}

Vector sample_mvn_precision(RngStream& rng, const PrecisionGaussian& g) {
  if (g.precision.rows() != g.shift.size())
    throw std::invalid_argument("sample_mvn_precision: shape mismatch");
  Matrix l = cholesky(g.precision);
  Vector mean = chol_solve(l, g.shift);
  Vector z(g.shift.size());
  for (double& zi : z) zi = rng.normal();
  Vector noise = backward_solve_transposed(l, z);
  for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += noise[i];
  return mean;
}

}  // namespace identlink
