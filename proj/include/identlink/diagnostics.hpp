#ifndef IDENTLINK_DIAGNOSTICS_HPP
#define IDENTLINK_DIAGNOSTICS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "identlink/draws.hpp"
#include "identlink/multinomial_model.hpp"
#include "identlink/poisson_model.hpp"
#include "identlink/rng.hpp"

namespace identlink {

// ---------------------------------------------------------------------------
// Chain quality metrics
// ---------------------------------------------------------------------------

// Effective sample size by Geyer's initial monotone positive sequence
// estimator on the autocovariances.  A constant sequence has ESS
// defined as its length, with *constant_warning set.
double effective_sample_size(const Vector& draws, bool* constant_warning = nullptr);

// Geweke convergence score: the mean of the first 10% of the chain
// against the mean of the last 50%, standardized by ESS-based
// standard errors.
double geweke_z(const Vector& draws);

double quantile(Vector sorted_or_not, double prob);

struct CoordinateSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0, q50 = 0.0, q975 = 0.0;
  double ess = 0.0;
  double mcse = 0.0;       // sd / sqrt(ess)
  double geweke = 0.0;     // worst |z| across chains, signed
  bool ess_warning = false;
};

struct ChainSummary {
  std::vector<CoordinateSummary> coords;
  std::size_t n_draws = 0;
  std::size_t n_chains = 0;
};

ChainSummary summarize(const DrawMatrix& draws);

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov utilities
// ---------------------------------------------------------------------------

double ks_statistic(Vector draws, const std::function<double(double)>& cdf);
double two_sample_ks(Vector a, Vector b);
// Asymptotic one-sample critical value at the given level.
double ks_critical_value(double alpha, std::size_t n);
double two_sample_ks_critical_value(double alpha, std::size_t n, std::size_t m);
// CDF of Ga(k, 1) for integer k >= 1 (Erlang).
double gamma_count_cdf(std::int64_t k, double x);

// ---------------------------------------------------------------------------
// Getting-it-right sampler-correctness harness
// ---------------------------------------------------------------------------
//
// Two simulators of the same joint distribution of (beta, y): the
// marginal-conditional one draws beta from the prior and y from the
// likelihood independently each round; the successive-conditional one
// alternates the model's posterior transition kernel with
// regeneration of y from the likelihood.  If the kernel has the
// correct stationary law the two agree, and every test function's
// z-score is standard normal.

struct GirRow {
  std::string name;
  double mc_mean = 0.0, mc_se = 0.0;
  double sc_mean = 0.0, sc_se = 0.0;
  double z = 0.0;
};

struct GirReport {
  std::vector<GirRow> rows;
  std::size_t n_outer = 0;
  double max_abs_z() const;
  bool all_within(double z_max) const;
};

enum class GirModel { PoissonLambda, MultinomialLambda, PoissonExp };

// Counts in the skeletons are overwritten by likelihood draws every
// round.  u_rate_scale != 1 deliberately corrupts the Poisson kernel's
// gamma rate; the harness must flag that.
GirReport getting_it_right_poisson(const PoissonData& skeleton, const GaussianPrior& prior,
                                   std::size_t n_outer, RngStream& rng,
                                   double u_rate_scale = 1.0);
GirReport getting_it_right_multinomial(const MultinomialData& skeleton,
                                       const GaussianPrior& prior, std::size_t n_outer,
                                       RngStream& rng);
GirReport getting_it_right_explink(const PoissonData& skeleton, const GaussianPrior& prior,
                                   double step, std::size_t n_inner, std::size_t n_outer,
                                   RngStream& rng);

// Dispatcher over the bundled small model specs.
GirReport getting_it_right(GirModel model, std::size_t n_outer, RngStream& rng,
                           bool corrupt_kernel = false);

// ---------------------------------------------------------------------------
// Distributional probes of the augmentation scheme
// ---------------------------------------------------------------------------

// Marginal law of the rescaled gamma latent: u_hat_i = b_i u_i should
// be Ga(y_i, 1) regardless of beta.  Rows with y_i = 0 are skipped.
struct UhatKsRow {
  std::size_t obs_index = 0;
  std::int64_t count = 0;
  double ks = 0.0;
  bool skipped_zero_count = false;
  bool low_power = false;  // fewer than 1000 draws
};

std::vector<UhatKsRow> uhat_marginal_test(const PoissonData& data, const Vector& beta,
                                          std::size_t n_draws, RngStream& rng);

// Raw u_hat draws for one observation (two-sample invariance checks).
Vector sample_uhat(const PoissonData& data, const Vector& beta, std::size_t obs_index,
                   std::size_t n_draws, RngStream& rng);

// Bound on the normalized latent t_hat: E[h(t_hat) | beta] <= 2 E[h(z)]
// for any non-negative h and standard normal z.  t_hat is assembled
// from the IG latent exactly as in the change of variables:
// c = (n/2 + u) s, v_hat = c v, t_hat = sqrt(c) (sqrt(v_hat) - 1/sqrt(v_hat)).
enum class BoundTestFunction { Square, Abs, Fourth };

struct LatentBoundResult {
  double lhs = 0.0;     // Monte Carlo estimate of E[h(t_hat) | beta]
  double lhs_se = 0.0;
  double rhs = 0.0;     // exact 2 E[h(z)]
  bool holds(double n_se = 3.0) const { return lhs <= rhs + n_se * lhs_se; }
};

LatentBoundResult latent_bound_test(const PoissonData& data, const Vector& beta,
                                   std::size_t obs_index, BoundTestFunction h,
                                   std::size_t n_draws, RngStream& rng);

// ---------------------------------------------------------------------------
// Empirical drift probe
// ---------------------------------------------------------------------------
//
// V(beta) = beta' Psi beta.  (PV)(beta0) is the expected V after one
// Gibbs transition from beta0, estimated by independent single sweeps
// (latents redrawn from their beta0-conditionals each replicate).
// Geometric ergodicity implies (PV)/V falls below 1 at large norms.

struct DriftPoint {
  Vector beta0;
  double radius = 0.0;
  std::size_t direction = 0;
  double v = 0.0;
  double pv = 0.0;
  double pv_se = 0.0;
  double ratio = 0.0;  // NaN when v == 0
  bool ok = true;
  std::string note;
};

struct DriftReport {
  std::vector<DriftPoint> points;
};

DriftReport empirical_drift(const PoissonData& data, const GaussianPrior& prior,
                            const Vector& norm_grid, std::size_t n_directions,
                            std::size_t n_mc, RngStream& rng);

// ---------------------------------------------------------------------------
// Bundled fixtures for the harnesses and the CLI defaults
// ---------------------------------------------------------------------------

PoissonData gir_poisson_spec();              // n=3, p=2, unit exposures
MultinomialData gir_multinomial_spec();      // n=3, p_i=2, m_i=2, p=2
GaussianPrior standard_prior(std::size_t p); // mu = 0, Psi = I
PoissonData drift_test_design();             // full rank, all y_i >= 1
PoissonData latent_probe_data();               // strictly positive counts

}  // namespace identlink

#endif  // IDENTLINK_DIAGNOSTICS_HPP
