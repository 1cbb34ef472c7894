#include "identlink/baseline_explink.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace identlink {

void MhConfig::validate() const {
  if (!(initial_step > 0.0)) throw std::invalid_argument("mh config: initial_step must be positive");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    throw std::invalid_argument("mh config: target_accept must be in (0, 1)");
  if (keep < 1 || thin < 1 || n_chains < 1 || adapt_window < 1)
    throw std::invalid_argument("mh config: counts must be >= 1");
}

double explink_log_posterior(const Vector& gamma, const PoissonData& data,
                             const GaussianPrior& prior, bool* clamped) {
  if (gamma.size() != data.p())
    throw std::invalid_argument("explink_log_posterior: gamma size mismatch");
  for (double g : gamma)
    if (!std::isfinite(g)) throw std::domain_error("explink_log_posterior: non-finite gamma");
  if (clamped) *clamped = false;
  double ll = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    double eta = dot(data.row(i), gamma);
    if (eta > 700.0) {
      eta = 700.0;
      if (clamped) *clamped = true;
    }
    double y = static_cast<double>(data.counts[i]);
    double n_i = data.exposures[i];
    ll += y * eta + y * std::log(n_i) - n_i * std::exp(eta) - std::lgamma(y + 1.0);
  }
  Vector centered(gamma.size());
  for (std::size_t j = 0; j < gamma.size(); ++j) centered[j] = gamma[j] - prior.mean[j];
  return ll - 0.5 * quad_form(prior.precision, centered);
}

Vector explink_log_posterior_grad(const Vector& gamma, const PoissonData& data,
                                  const GaussianPrior& prior) {
  if (gamma.size() != data.p())
    throw std::invalid_argument("explink_log_posterior_grad: gamma size mismatch");
  Vector grad(gamma.size(), 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    double eta = std::min(dot(data.row(i), gamma), 700.0);
    double resid = static_cast<double>(data.counts[i]) - data.exposures[i] * std::exp(eta);
    for (std::size_t j = 0; j < gamma.size(); ++j) grad[j] += data.design(i, j) * resid;
  }
  Vector centered(gamma.size());
  for (std::size_t j = 0; j < gamma.size(); ++j) centered[j] = gamma[j] - prior.mean[j];
  Vector prior_part = matvec(prior.precision, centered);
  for (std::size_t j = 0; j < gamma.size(); ++j) grad[j] -= prior_part[j];
  return grad;
}

double rwm_update(Vector& gamma, double& log_post, double step, const PoissonData& data,
                  const GaussianPrior& prior, RngStream& rng) {
  Vector proposal(gamma.size());
  for (std::size_t j = 0; j < gamma.size(); ++j) proposal[j] = gamma[j] + step * rng.normal();
  double lp_new = explink_log_posterior(proposal, data, prior);
  double alpha = std::min(1.0, std::exp(lp_new - log_post));
  if (rng.uniform() < alpha) {
    gamma = std::move(proposal);
    log_post = lp_new;
  }
  return alpha;
}

namespace {

struct ChainResult {
  std::vector<double> gammas;
  std::vector<double> step_trace;
  double final_step = 0.0;
  double acceptance = 0.0;
  std::exception_ptr error;
};

void run_one_chain(const PoissonData& data, const GaussianPrior& prior, const MhConfig& cfg,
                   std::uint32_t chain_id, ChainResult& out) {
  try {
    RngStream rng(cfg.seed, chain_id);
    Vector gamma;
    switch (cfg.init.kind) {
      case InitSpec::Kind::PriorDraw: {
        PrecisionGaussian g{prior.precision, matvec(prior.precision, prior.mean)};
        gamma = sample_mvn_precision(rng, g);
        break;
      }
      case InitSpec::Kind::Zero:
        gamma.assign(data.p(), 0.0);
        break;
      case InitSpec::Kind::Given:
        if (cfg.init.value.size() != data.p())
          throw std::invalid_argument("initial gamma has wrong dimension");
        gamma = cfg.init.value;
        break;
    }
    double log_post = explink_log_posterior(gamma, data, prior);

    // Robbins-Monro on log step, damped by the iteration count in
    // units of adapt_window.
    double log_step = std::log(cfg.initial_step);
    const double log_step_min = std::log(1e-8), log_step_max = std::log(1e4);
    for (std::size_t t = 0; t < cfg.burn_in; ++t) {
      double step = std::exp(log_step);
      double alpha = rwm_update(gamma, log_post, step, data, prior, rng);
      double gain = 1.0 / (1.0 + static_cast<double>(t) / static_cast<double>(cfg.adapt_window));
      log_step += gain * (alpha - cfg.target_accept);
      log_step = std::clamp(log_step, log_step_min, log_step_max);
    }
    const double step = std::exp(log_step);
    out.final_step = step;

    std::size_t accepted = 0, proposals = 0;
    out.gammas.reserve(cfg.keep * data.p());
    out.step_trace.reserve(cfg.keep);
    for (std::size_t k = 0; k < cfg.keep; ++k) {
      for (std::size_t t = 0; t < cfg.thin; ++t) {
        Vector before = gamma;
        rwm_update(gamma, log_post, step, data, prior, rng);
        ++proposals;
        if (gamma != before) ++accepted;
      }
      out.gammas.insert(out.gammas.end(), gamma.begin(), gamma.end());
      out.step_trace.push_back(step);
    }
    out.acceptance = proposals ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
  } catch (...) {
    out.error = std::current_exception();
  }
}

}  // namespace

DrawMatrix run_mh_chain(const PoissonData& data, const GaussianPrior& prior,
                        const MhConfig& config) {
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
  draws.n_params = data.p();
  for (std::size_t j = 0; j < data.p(); ++j)
    draws.param_names.push_back("gamma_" + std::to_string(j));
  draws.seed = config.seed;
  draws.n_chains = config.n_chains;
  for (std::uint32_t c = 0; c < config.n_chains; ++c) {
    const ChainResult& r = results[c];
    draws.values.insert(draws.values.end(), r.gammas.begin(), r.gammas.end());
    draws.mh_step_trace.insert(draws.mh_step_trace.end(), r.step_trace.begin(),
                               r.step_trace.end());
    draws.mh_final_steps.push_back(r.final_step);
    draws.mh_acceptance_rates.push_back(r.acceptance);
    for (std::size_t k = 0; k < config.keep; ++k) {
      draws.chain.push_back(c);
      draws.sweep.push_back(config.burn_in + (k + 1) * config.thin);
    }
  }
  return draws;
}

}  // namespace identlink
