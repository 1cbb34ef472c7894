#ifndef IDENTLINK_POISSON_MODEL_HPP
#define IDENTLINK_POISSON_MODEL_HPP

#include <cstdint>
#include <vector>

#include "identlink/draws.hpp"
#include "identlink/linalg.hpp"
#include "identlink/rng.hpp"

namespace identlink {

// Poisson regression with the identity-like link:
//
//   beta ~ N_p(mu, Psi^{-1}),   y_i ~ Po( n_i lambda(x_i' beta) ),
//
// sampled by data augmentation.  One Gibbs sweep draws, for each
// observation with xi_i = x_i' beta, b_i = 2/lambda(xi_i),
// s_i = sqrt(xi_i^2 + 4):
//
//   u_i ~ Ga(y_i, b_i)                     (u_i = 0 when y_i = 0),
//   v_i ~ IG( 1 / ((n_i/2 + u_i) s_i), 1 ),
//   w_i = v_i (n_i/2 + u_i)^2,
//
// and then
//
//   beta ~ N_p( (Psi + X'WX)^{-1} {Psi mu + X'(u - n/2)},
//               (Psi + X'WX)^{-1} ).

struct GaussianPrior {
  Vector mean;       // mu
  Matrix precision;  // Psi, SPD

  void validate() const;  // symmetry + Cholesky check
};

struct PoissonData {
  Matrix design;                     // n x p, rows x_i'
  std::vector<std::int64_t> counts;  // y_i >= 0
  Vector exposures;                  // n_i > 0

  PoissonData() = default;
  PoissonData(Matrix design, std::vector<std::int64_t> counts, Vector exposures);

  std::size_t n() const { return counts.size(); }
  std::size_t p() const { return design.cols(); }
  Vector row(std::size_t i) const;
};

struct PoissonChainState {
  Vector beta;
  Vector u;  // gamma latents, exactly 0 where y_i = 0
  Vector v;  // inverse Gaussian latents, > 0
  Vector w;  // w_i = v_i (n_i/2 + u_i)^2
};

// The Gaussian full conditional of beta for fixed latents (u, w).
PrecisionGaussian beta_conditional(const PoissonData& data, const GaussianPrior& prior,
                                   const Vector& u, const Vector& w);

// One full scan of the augmented sampler.
PoissonChainState gibbs_sweep(const PoissonChainState& state, const PoissonData& data,
                              const GaussianPrior& prior, RngStream& rng);

namespace detail {
// Sweep with the gamma rate multiplied by u_rate_scale.  Only the
// sampler-correctness harness uses a scale != 1, to confirm that a
// wrong kernel is detected.
PoissonChainState gibbs_sweep_scaled_u(const PoissonChainState& state,
                                       const PoissonData& data, const GaussianPrior& prior,
                                       RngStream& rng, double u_rate_scale);
}  // namespace detail

// Starting state: beta from the init spec (prior draw by default);
// latents are overwritten in the first sweep.
PoissonChainState initial_state(const PoissonData& data, const GaussianPrior& prior,
                                const InitSpec& init, RngStream& rng);

double log_likelihood(const Vector& beta, const PoissonData& data);

DrawMatrix run_chains(const PoissonData& data, const GaussianPrior& prior,
                      const SamplerConfig& config);

struct PredictiveDraws {
  Vector values;  // exposure * lambda(x_new' beta) per stored draw
  double mean = 0.0;
};

PredictiveDraws posterior_predictive_mean(const DrawMatrix& draws, const Vector& x_new,
                                          double exposure);

// Merge rows with exactly identical covariate vectors, summing counts
// and exposures.  The posterior of beta is unchanged.
PoissonData collapse_duplicates(const PoissonData& data);

}  // namespace identlink

#endif  // IDENTLINK_POISSON_MODEL_HPP
