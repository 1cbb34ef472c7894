#include "identlink/poisson_model.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "identlink/errors.hpp"
#include "identlink/link.hpp"

namespace identlink {

void GaussianPrior::validate() const {
  if (precision.rows() != precision.cols() || precision.rows() != mean.size())
    throw std::invalid_argument("prior: dimension mismatch");
  for (std::size_t i = 0; i < precision.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double a = precision(i, j), b = precision(j, i);
      double scale = std::max({std::abs(a), std::abs(b), 1.0});
      if (std::abs(a - b) > 1e-10 * scale)
        throw std::invalid_argument("prior: precision matrix is not symmetric");
    }
  cholesky(precision);  // throws numerical_error when not SPD
}

PoissonData::PoissonData(Matrix design_, std::vector<std::int64_t> counts_, Vector exposures_)
    : design(std::move(design_)), counts(std::move(counts_)), exposures(std::move(exposures_)) {
  const std::size_t n = counts.size();
  if (n == 0) throw std::invalid_argument("poisson data: need at least one observation");
  if (design.rows() != n || exposures.size() != n)
    throw std::invalid_argument("poisson data: row counts disagree");
  if (design.cols() == 0) throw std::invalid_argument("poisson data: need at least one covariate");
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] < 0) throw std::invalid_argument("poisson data: negative count");
    if (!(exposures[i] > 0.0) || !std::isfinite(exposures[i]))
      throw std::invalid_argument("poisson data: exposures must be positive and finite");
    for (std::size_t j = 0; j < design.cols(); ++j)
      if (!std::isfinite(design(i, j)))
        throw std::invalid_argument("poisson data: non-finite design entry");
  }
}

Vector PoissonData::row(std::size_t i) const {
  Vector x(p());
  for (std::size_t j = 0; j < p(); ++j) x[j] = design(i, j);
  return x;
}

PrecisionGaussian beta_conditional(const PoissonData& data, const GaussianPrior& prior,
                                   const Vector& u, const Vector& w) {
  const std::size_t n = data.n(), p = data.p();
  if (u.size() != n || w.size() != n)
    throw std::invalid_argument("beta_conditional: latent size mismatch");
  PrecisionGaussian g;
  g.precision = prior.precision;
  g.shift = matvec(prior.precision, prior.mean);
  for (std::size_t i = 0; i < n; ++i) {
    double resid = u[i] - 0.5 * data.exposures[i];
    for (std::size_t j = 0; j < p; ++j) g.shift[j] += data.design(i, j) * resid;
    Vector xi = data.row(i);
    add_outer(g.precision, xi, w[i]);
  }
  return g;
}

namespace detail {

PoissonChainState gibbs_sweep_scaled_u(const PoissonChainState& state,
                                       const PoissonData& data, const GaussianPrior& prior,
                                       RngStream& rng, double u_rate_scale) {
  const std::size_t n = data.n(), p = data.p();
  if (state.beta.size() != p) throw std::invalid_argument("gibbs_sweep: beta size mismatch");
  PoissonChainState next;
  next.u.resize(n);
  next.v.resize(n);
  next.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double xi = dot(data.row(i), state.beta);
    LinkValue lv = link_eval(xi);
    double u_i = 0.0;
    if (data.counts[i] >= 1)
      u_i = sample_gamma(rng, static_cast<double>(data.counts[i]), u_rate_scale * lv.b);
    double rate = (0.5 * data.exposures[i] + u_i) * lv.s;
    double ig_mean = 1.0 / rate;
    if (!(ig_mean > 0.0)) ig_mean = 1e-300;  // rate overflow guard
    double v_i = sample_inverse_gaussian(rng, ig_mean, 1.0);
    next.u[i] = u_i;
    next.v[i] = v_i;
    double a = 0.5 * data.exposures[i] + u_i;
    next.w[i] = v_i * a * a;
  }
  PrecisionGaussian g = beta_conditional(data, prior, next.u, next.w);
  next.beta = sample_mvn_precision(rng, g);
  return next;
}

}  // namespace detail

PoissonChainState gibbs_sweep(const PoissonChainState& state, const PoissonData& data,
                              const GaussianPrior& prior, RngStream& rng) {
  return detail::gibbs_sweep_scaled_u(state, data, prior, rng, 1.0);
}

PoissonChainState initial_state(const PoissonData& data, const GaussianPrior& prior,
                                const InitSpec& init, RngStream& rng) {
  PoissonChainState state;
  switch (init.kind) {
    case InitSpec::Kind::PriorDraw: {
      PrecisionGaussian g{prior.precision, matvec(prior.precision, prior.mean)};
      state.beta = sample_mvn_precision(rng, g);
      break;
    }
    case InitSpec::Kind::Zero:
      state.beta.assign(data.p(), 0.0);
      break;
    case InitSpec::Kind::Given:
      if (init.value.size() != data.p())
        throw std::invalid_argument("initial beta has wrong dimension");
      state.beta = init.value;
      break;
  }
  state.u.assign(data.n(), 0.0);
  state.v.assign(data.n(), 1.0);
  state.w.assign(data.n(), 0.0);
  return state;
}

double log_likelihood(const Vector& beta, const PoissonData& data) {
  if (beta.size() != data.p()) throw std::invalid_argument("log_likelihood: beta size mismatch");
  double ll = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    double lam = link_lambda(dot(data.row(i), beta));
    double mean = data.exposures[i] * lam;
    double y = static_cast<double>(data.counts[i]);
    ll += y * std::log(mean) - mean - std::lgamma(y + 1.0);
  }
  return ll;
}

namespace {

struct ChainResult {
  std::vector<double> betas;  // keep x p
  std::vector<double> u, v;   // keep x n when stored
  std::exception_ptr error;
};

void run_one_chain(const PoissonData& data, const GaussianPrior& prior,
                   const SamplerConfig& cfg, std::uint32_t chain_id, ChainResult& out) {
  try {
    RngStream rng(cfg.seed, chain_id);
    PoissonChainState state = initial_state(data, prior, cfg.init, rng);
    const std::size_t p = data.p(), n = data.n();
    out.betas.reserve(cfg.keep * p);
    if (cfg.store_latents) {
      out.u.reserve(cfg.keep * n);
      out.v.reserve(cfg.keep * n);
    }
    std::size_t sweep_index = 0;
    auto advance = [&]() {
      try {
        state = gibbs_sweep(state, data, prior, rng);
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
      if (cfg.store_latents) {
        out.u.insert(out.u.end(), state.u.begin(), state.u.end());
        out.v.insert(out.v.end(), state.v.begin(), state.v.end());
      }
    }
  } catch (...) {
    out.error = std::current_exception();
  }
}

}  // namespace

DrawMatrix run_chains(const PoissonData& data, const GaussianPrior& prior,
                      const SamplerConfig& config) {
  config.validate();
  prior.validate();
  const std::size_t p = data.p(), n = data.n();

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
  draws.n_params = p;
  for (std::size_t j = 0; j < p; ++j) draws.param_names.push_back("beta_" + std::to_string(j));
  draws.seed = config.seed;
  draws.n_chains = config.n_chains;
  if (config.store_latents) draws.n_latent = n;
  for (std::uint32_t c = 0; c < config.n_chains; ++c) {
    const ChainResult& r = results[c];
    draws.values.insert(draws.values.end(), r.betas.begin(), r.betas.end());
    if (config.store_latents) {
      draws.latent_u.insert(draws.latent_u.end(), r.u.begin(), r.u.end());
      draws.latent_v.insert(draws.latent_v.end(), r.v.begin(), r.v.end());
    }
    for (std::size_t k = 0; k < config.keep; ++k) {
      draws.chain.push_back(c);
      draws.sweep.push_back(config.burn_in + (k + 1) * config.thin);
    }
  }
  return draws;
}

PredictiveDraws posterior_predictive_mean(const DrawMatrix& draws, const Vector& x_new,
                                          double exposure) {
  if (x_new.size() != draws.n_params)
    throw std::invalid_argument("posterior_predictive_mean: covariate dimension mismatch");
  if (!(exposure > 0.0)) throw std::domain_error("posterior_predictive_mean: exposure must be positive");
  PredictiveDraws out;
  out.values.resize(draws.rows());
  double sum = 0.0;
  for (std::size_t r = 0; r < draws.rows(); ++r) {
    double xi = 0.0;
    for (std::size_t j = 0; j < draws.n_params; ++j) xi += draws.at(r, j) * x_new[j];
    out.values[r] = exposure * link_lambda(xi);
    sum += out.values[r];
  }
  out.mean = draws.rows() ? sum / static_cast<double>(draws.rows()) : 0.0;
  return out;
}

PoissonData collapse_duplicates(const PoissonData& data) {
  std::map<Vector, std::size_t> seen;
  std::vector<Vector> rows;
  std::vector<std::int64_t> counts;
  Vector exposures;
  for (std::size_t i = 0; i < data.n(); ++i) {
    Vector x = data.row(i);
    auto [it, inserted] = seen.emplace(x, rows.size());
    if (inserted) {
      rows.push_back(std::move(x));
      counts.push_back(data.counts[i]);
      exposures.push_back(data.exposures[i]);
    } else {
      counts[it->second] += data.counts[i];
      exposures[it->second] += data.exposures[i];
    }
  }
  Matrix design(rows.size(), data.p());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < data.p(); ++j) design(i, j) = rows[i][j];
  return PoissonData(std::move(design), std::move(counts), std::move(exposures));
}

}  // namespace identlink
