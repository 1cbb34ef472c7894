#ifndef IDENTLINK_BASELINE_EXPLINK_HPP
#define IDENTLINK_BASELINE_EXPLINK_HPP

#include "identlink/draws.hpp"
#include "identlink/poisson_model.hpp"
#include "identlink/rng.hpp"

namespace identlink {

// The comparison model: ordinary exp-link Poisson regression
//
//   gamma ~ N_p(mu, Psi^{-1}),   y_i ~ Po( n_i exp(x_i' gamma) ),
//
// sampled by adaptive random-walk Metropolis.  The step size follows
// Robbins-Monro on the log scale toward target_accept during burn-in
// and is frozen afterwards, so every kept draw comes from a fixed
// kernel.

struct MhConfig {
  double initial_step = 0.1;
  double target_accept = 0.30;
  std::size_t adapt_window = 50;  // damping horizon of the Robbins-Monro gain
  std::size_t burn_in = 5000;
  std::size_t keep = 5000;
  std::size_t thin = 1;
  std::size_t n_chains = 1;
  std::uint64_t seed = 0;
  InitSpec init{InitSpec::Kind::Zero, {}};

  void validate() const;
};

// Log posterior up to an additive constant.  Linear predictors above
// +700 are clamped before exponentiation; *clamped is set when that
// happens.
double explink_log_posterior(const Vector& gamma, const PoissonData& data,
                             const GaussianPrior& prior, bool* clamped = nullptr);

Vector explink_log_posterior_grad(const Vector& gamma, const PoissonData& data,
                                  const GaussianPrior& prior);

// One fixed-step random-walk Metropolis update of gamma; returns the
// acceptance probability of the proposal.  This is the frozen kernel
// used after burn-in, and the one the correctness harness drives.
double rwm_update(Vector& gamma, double& log_post, double step, const PoissonData& data,
                  const GaussianPrior& prior, RngStream& rng);

DrawMatrix run_mh_chain(const PoissonData& data, const GaussianPrior& prior,
                        const MhConfig& config);

}  // namespace identlink

#endif  // IDENTLINK_BASELINE_EXPLINK_HPP
