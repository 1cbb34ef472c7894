#include "identlink/multinomial_model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "identlink/errors.hpp"
#include "identlink/link.hpp"

namespace identlink {

MultinomialData::MultinomialData(std::vector<MultinomialObservation> obs_, std::size_t p_)
    : obs(std::move(obs_)), p(p_) {
  if (obs.empty()) throw std::invalid_argument("multinomial data: need at least one observation");
  if (p == 0) throw std::invalid_argument("multinomial data: need at least one covariate");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto& o = obs[i];
    if (o.trials < 1) throw std::invalid_argument("multinomial data: trials must be >= 1");
    if (o.n_categories() < 1)
      throw std::invalid_argument("multinomial data: need at least one non-baseline category");
    if (o.counts.size() != o.n_categories() + 1)
      throw std::invalid_argument("multinomial data: counts/categories mismatch");
    if (o.covariates.cols() != p)
      throw std::invalid_argument("multinomial data: covariate dimension mismatch");
    std::int64_t total = 0;
    for (std::int64_t c : o.counts) {
      if (c < 0) throw std::invalid_argument("multinomial data: negative count");
      total += c;
    }
    if (total != o.trials)
      throw std::invalid_argument("multinomial data: counts of observation " +
                                  std::to_string(i) + " do not sum to trials");
    for (std::size_t k = 0; k < o.covariates.rows(); ++k)
      for (std::size_t j = 0; j < p; ++j)
        if (!std::isfinite(o.covariates(k, j)))
          throw std::invalid_argument("multinomial data: non-finite covariate");
  }
}

namespace {

Vector covariate_row(const MultinomialObservation& o, std::size_t k) {
  Vector x(o.covariates.cols());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = o.covariates(k, j);
  return x;
}

}  // namespace

Vector category_probs(const Vector& beta, std::size_t obs_index, const MultinomialData& data) {
  const auto& o = data.obs.at(obs_index);
  Vector lambdas(o.n_categories());
  double big_lambda = 0.0;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    lambdas[k] = link_lambda(dot(covariate_row(o, k), beta));
    big_lambda += lambdas[k];
  }
  Vector probs(o.n_categories() + 1);
  double denom = 1.0 + big_lambda;
  probs[0] = 1.0 / denom;
  for (std::size_t k = 0; k < lambdas.size(); ++k) probs[k + 1] = lambdas[k] / denom;
  return probs;
}

PrecisionGaussian beta_conditional_multinomial(const MultinomialData& data,
                                               const GaussianPrior& prior, const Vector& u0,
                                               const std::vector<Vector>& u,
                                               const std::vector<Vector>& v) {
  if (u0.size() != data.n() || u.size() != data.n() || v.size() != data.n())
    throw std::invalid_argument("beta_conditional_multinomial: latent size mismatch");
  PrecisionGaussian g;
  g.precision = prior.precision;
  g.shift = matvec(prior.precision, prior.mean);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& o = data.obs[i];
    for (std::size_t k = 0; k < o.n_categories(); ++k) {
      Vector x = covariate_row(o, k);
      double a = u[i][k] + u0[i];
      add_outer(g.precision, x, v[i][k] * a * a);
      double resid = u[i][k] - u0[i];
      for (std::size_t j = 0; j < data.p; ++j) g.shift[j] += x[j] * resid;
    }
  }
  return g;
}

MultinomialChainState gibbs_sweep_multinomial(const MultinomialChainState& state,
                                              const MultinomialData& data,
                                              const GaussianPrior& prior, RngStream& rng) {
  const std::size_t n = data.n(), p = data.p;
  if (state.beta.size() != p)
    throw std::invalid_argument("gibbs_sweep_multinomial: beta size mismatch");
  MultinomialChainState next;
  next.u0.resize(n);
  next.u.resize(n);
  next.v.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = data.obs[i];
    const std::size_t pi = o.n_categories();
    std::vector<LinkValue> lv(pi);
    double big_lambda = 0.0;
    for (std::size_t k = 0; k < pi; ++k) {
      lv[k] = link_eval(dot(covariate_row(o, k), state.beta));
      big_lambda += lv[k].lambda;
    }
    double u0 = sample_gamma(rng, static_cast<double>(o.trials), 2.0 + 2.0 * big_lambda);
    next.u0[i] = u0;
    next.u[i].resize(pi);
    next.v[i].resize(pi);
    for (std::size_t k = 0; k < pi; ++k) {
      double uk = 0.0;
      if (o.counts[k + 1] >= 1)
        uk = sample_gamma(rng, static_cast<double>(o.counts[k + 1]), lv[k].b);
      double rate = (uk + u0) * lv[k].s;
      double ig_mean = 1.0 / rate;
      if (!(ig_mean > 0.0)) ig_mean = 1e-300;
      next.u[i][k] = uk;
      next.v[i][k] = sample_inverse_gaussian(rng, ig_mean, 1.0);
    }
  }
  PrecisionGaussian g = beta_conditional_multinomial(data, prior, next.u0, next.u, next.v);
  next.beta = sample_mvn_precision(rng, g);
  return next;
}

MultinomialChainState initial_state_multinomial(const MultinomialData& data,
                                                const GaussianPrior& prior,
                                                const InitSpec& init, RngStream& rng) {
  MultinomialChainState state;
  switch (init.kind) {
    case InitSpec::Kind::PriorDraw: {
      PrecisionGaussian g{prior.precision, matvec(prior.precision, prior.mean)};
      state.beta = sample_mvn_precision(rng, g);
      break;
    }
    case InitSpec::Kind::Zero:
      state.beta.assign(data.p, 0.0);
      break;
    case InitSpec::Kind::Given:
      if (init.value.size() != data.p)
        throw std::invalid_argument("initial beta has wrong dimension");
      state.beta = init.value;
      break;
  }
  state.u0.assign(data.n(), 1.0);
  state.u.resize(data.n());
  state.v.resize(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    state.u[i].assign(data.obs[i].n_categories(), 0.0);
    state.v[i].assign(data.obs[i].n_categories(), 1.0);
  }
  return state;
}

double multinomial_log_likelihood(const Vector& beta, const MultinomialData& data) {
  if (beta.size() != data.p)
    throw std::invalid_argument("multinomial_log_likelihood: beta size mismatch");
  double ll = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& o = data.obs[i];
    ll += std::lgamma(static_cast<double>(o.trials) + 1.0);
    for (std::int64_t c : o.counts) ll -= std::lgamma(static_cast<double>(c) + 1.0);
    double big_lambda = 0.0;
    Vector loglam(o.n_categories());
    for (std::size_t k = 0; k < o.n_categories(); ++k) {
      double lam = link_lambda(dot(covariate_row(o, k), beta));
      big_lambda += lam;
      loglam[k] = std::log(lam);
    }
    ll -= static_cast<double>(o.trials) * std::log1p(big_lambda);
    for (std::size_t k = 0; k < o.n_categories(); ++k)
      ll += static_cast<double>(o.counts[k + 1]) * loglam[k];
  }
  return ll;
}

namespace {

struct ChainResult {
  std::vector<double> betas;
  std::exception_ptr error;
};

void run_one_chain(const MultinomialData& data, const GaussianPrior& prior,
                   const SamplerConfig& cfg, std::uint32_t chain_id, ChainResult& out) {
  try {
    RngStream rng(cfg.seed, chain_id);
    MultinomialChainState state = initial_state_multinomial(data, prior, cfg.init, rng);
    out.betas.reserve(cfg.keep * data.p);
    std::size_t sweep_index = 0;
    auto advance = [&]() {
      try {
        state = gibbs_sweep_multinomial(state, data, prior, rng);
      } catch (const numerical_error& e) {
        throw numerical_error("chain " + std::to_string(chain_id) + " sweep " +
                                  std::to_string(sweep_index) + ": " + e.what(),
                              e.index());
      }
      ++sweep_index;
    };
    for (std::size_t b = 0; b < cfg.burn_in; ++b) advance();
    for (std::size_t k = 0; k < cfg.keep; ++k) {
      for (std::size_t t = 0; t < cfg.thin; ++t) advance();
      out.betas.insert(out.betas.end(), state.beta.begin(), state.beta.end());
    }
  } catch (...) {
    out.error = std::current_exception();
  }
}

}  // namespace

DrawMatrix run_chains_multinomial(const MultinomialData& data, const GaussianPrior& prior,
                                  const SamplerConfig& config) {
  config.validate();
  prior.validate();
  std::vector<ChainResult> results(config.n_chains);
  if (config.n_chains == 1) {
    run_one_chain(data, prior, config, 0, results[0]);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(config.n_chains);
    for (std::uint32_t c = 0; c < config.n_chains; ++c)
      workers.emplace_back(run_one_chain, std::cref(data), std::cref(prior),
                           std::cref(config), c, std::ref(results[c]));
    for (auto& t : workers) t.join();
  }
  for (auto& r : results)
    if (r.error) std::rethrow_exception(r.error);

  DrawMatrix draws;
  draws.n_params = data.p;
  for (std::size_t j = 0; j < data.p; ++j)
    draws.param_names.push_back("beta_" + std::to_string(j));
  draws.seed = config.seed;
  draws.n_chains = config.n_chains;
  for (std::uint32_t c = 0; c < config.n_chains; ++c) {
    draws.values.insert(draws.values.end(), results[c].betas.begin(), results[c].betas.end());
    for (std::size_t k = 0; k < config.keep; ++k) {
      draws.chain.push_back(c);
      draws.sweep.push_back(config.burn_in + (k + 1) * config.thin);
    }
  }
  return draws;
}

MultinomialData build_polychotomous_design(const Matrix& shared_covariates,
                                           std::size_t n_categories) {
  const std::size_t q = shared_covariates.cols();
  if (q == 0) throw std::invalid_argument("polychotomous design: need at least one covariate");
  if (n_categories == 0)
    throw std::invalid_argument("polychotomous design: need at least one category");
  const std::size_t p = q * n_categories;
  std::vector<MultinomialObservation> obs(shared_covariates.rows());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    MultinomialObservation& o = obs[i];
    o.trials = 1;
    o.counts.assign(n_categories + 1, 0);
    o.counts[0] = 1;  // placeholder: all mass on the baseline
    o.covariates = Matrix(n_categories, p);
    for (std::size_t k = 0; k < n_categories; ++k)
      for (std::size_t j = 0; j < q; ++j)
        o.covariates(k, k * q + j) = shared_covariates(i, j);
  }
  return MultinomialData(std::move(obs), p);
}

double bernoulli_success_prob(double xi) { return 2.0 / (2.0 + link_b_coeff(xi)); }

}  // namespace identlink
