#ifndef IDENTLINK_MULTINOMIAL_MODEL_HPP
#define IDENTLINK_MULTINOMIAL_MODEL_HPP

#include <cstdint>
#include <vector>

#include "identlink/draws.hpp"
#include "identlink/linalg.hpp"
#include "identlink/poisson_model.hpp"  // GaussianPrior
#include "identlink/rng.hpp"

namespace identlink {

// Multinomial response model with the identity-like link.  For
// observation i with m_i trials and categories k = 0..p_i, where
// lambda_{i,k} = lambda(x_{i,k}' beta) and Lambda_i = sum_k lambda_{i,k},
//
//   y_i ~ Multin( m_i, ( 1/(1+Lambda_i), lambda_{i,1}/(1+Lambda_i), ... ) ).
//
// Category 0 is the baseline and carries no covariates.  One Gibbs
// sweep draws, per observation,
//
//   u_{i,0} ~ Ga(m_i, 2 + 2 Lambda_i),
//   u_{i,k} ~ Ga(y_{i,k}, b_{i,k})          (0 when y_{i,k} = 0),
//   v_{i,k} ~ IG( 1 / ((u_{i,k} + u_{i,0}) s_{i,k}), 1 ),
//
// and then beta from the Gaussian with precision
// Psi + sum_{i,k} x_{i,k} v_{i,k} (u_{i,k} + u_{i,0})^2 x_{i,k}'
// and shift Psi mu + sum_{i,k} x_{i,k} (u_{i,k} - u_{i,0}).

struct MultinomialObservation {
  std::int64_t trials = 0;           // m_i >= 1
  std::vector<std::int64_t> counts;  // y_{i,0}, ..., y_{i,p_i}; sums to m_i
  Matrix covariates;                 // p_i x p; row k-1 holds x_{i,k}'

  std::size_t n_categories() const { return covariates.rows(); }  // p_i
};

struct MultinomialData {
  std::vector<MultinomialObservation> obs;
  std::size_t p = 0;  // shared coefficient dimension

  MultinomialData() = default;
  MultinomialData(std::vector<MultinomialObservation> obs, std::size_t p);

  std::size_t n() const { return obs.size(); }
};

struct MultinomialChainState {
  Vector beta;
  Vector u0;                   // u_{i,0} > 0
  std::vector<Vector> u;       // u_{i,k}, zero exactly where y_{i,k} = 0
  std::vector<Vector> v;       // v_{i,k} > 0
};

// (1/(1+Lambda_i), lambda_{i,1}/(1+Lambda_i), ..., lambda_{i,p_i}/(1+Lambda_i)).
Vector category_probs(const Vector& beta, std::size_t obs_index, const MultinomialData& data);

// The Gaussian full conditional of beta for fixed latents.
PrecisionGaussian beta_conditional_multinomial(const MultinomialData& data,
                                               const GaussianPrior& prior, const Vector& u0,
                                               const std::vector<Vector>& u,
                                               const std::vector<Vector>& v);

MultinomialChainState gibbs_sweep_multinomial(const MultinomialChainState& state,
                                              const MultinomialData& data,
                                              const GaussianPrior& prior, RngStream& rng);

MultinomialChainState initial_state_multinomial(const MultinomialData& data,
                                                const GaussianPrior& prior,
                                                const InitSpec& init, RngStream& rng);

double multinomial_log_likelihood(const Vector& beta, const MultinomialData& data);

DrawMatrix run_chains_multinomial(const MultinomialData& data, const GaussianPrior& prior,
                                  const SamplerConfig& config);

// Stacked design for polychotomous regression: shared covariates
// x_i in R^q and a common category count; x_{i,k} is zero except for
// block k, which holds x_i, so one stacked beta in R^(q K) encodes all
// per-category coefficient vectors and is updated in a single draw.
// Counts are placeholders (everything in the baseline) until filled in.
MultinomialData build_polychotomous_design(const Matrix& shared_covariates,
                                           std::size_t n_categories);

// Bernoulli special case: P(y = 1) = lambda(xi) / (1 + lambda(xi)),
// computed through the stable 2 / (2 + b(xi)) form.
double bernoulli_success_prob(double xi);

}  // namespace identlink

#endif  // IDENTLINK_MULTINOMIAL_MODEL_HPP
