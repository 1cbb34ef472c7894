#ifndef IDENTLINK_RNG_HPP
#define IDENTLINK_RNG_HPP

#include <cstdint>
#include <random>
#include <utility>

#include "identlink/linalg.hpp"

namespace identlink {

// Seeded random stream.  One stream per chain: identical (seed,
// stream_id) pairs reproduce the identical draw sequence bit-for-bit,
// distinct stream_ids give independent streams.  All variate
// transformations below are written out explicitly rather than taken
// from <random> so the sequences do not depend on the standard
// library implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1); rejects exact zeros.
  double uniform_pos();
  // Standard normal (Marsaglia polar, one cached value).
  double normal();

 private:
  std::uint64_t seed_, stream_id_;
  std::mt19937_64 gen_;
  double cached_normal_;
  bool have_cached_;
};

// Gamma draw with the rate parameterization: density
// rate^shape x^(shape-1) exp(-rate x) / Gamma(shape).
// Marsaglia-Tsang for shape >= 1; shapes below 1 are boosted through
// Ga(shape + 1) and the U^(1/shape) multiplier.
double sample_gamma(RngStream& rng, double shape, double rate);

// Inverse Gaussian IG(mu, lam) via the Michael-Schucany-Haas
// transform: one chi-square(1) variate, the smaller root of the
// quadratic, and a Bernoulli correction.  Density
//   sqrt(lam / (2 pi)) exp(lam / mu) v^(-3/2)
//     exp{ -(1/2) ((lam / mu^2) v + lam / v) },  v > 0,
// with mean mu and variance mu^3 / lam.
double sample_inverse_gaussian(RngStream& rng, double mu, double lam);

// One-sided stable Levy(0, 1) draw, density
// (2 pi)^(-1/2) z^(-3/2) exp(-1/(2 z)), generated as 1/z^2 with z
// standard normal.
double sample_levy(RngStream& rng);

// Monte Carlo check of the identity exp(-kappa) = E[exp(-zeta kappa^2 / 2)]
// with zeta ~ Levy(0, 1).  Returns the estimate and its standard error.
std::pair<double, double> verify_ig_identity(RngStream& rng, double kappa,
                                             std::size_t n_draws);

// Poisson count; Knuth's product method below mean 10, Hormann's
// transformed-rejection (PTRS) above.
std::int64_t sample_poisson(RngStream& rng, double mean);

// Multinomial counts by repeated categorical draws.  probs must be a
// simplex vector (non-negative, summing to 1 within 1e-12).
std::vector<std::int64_t> sample_multinomial(RngStream& rng, std::int64_t trials,
                                             const Vector& probs);

// Gaussian in precision form: the target is
//   N( precision^{-1} shift, precision^{-1} ).
// Sampling factors precision = L L', solves for the mean, and
// back-solves L' x = z against a standard normal z; the explicit
// inverse is never formed.
struct PrecisionGaussian {
  Matrix precision;  // SPD
  Vector shift;      // unnormalized linear term, e.g. Psi mu + X'(u - n/2)
};

Vector sample_mvn_precision(RngStream& rng, const PrecisionGaussian& g);

}  // namespace identlink

#endif  // IDENTLINK_RNG_HPP
