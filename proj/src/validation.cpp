#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "identlink/baseline_explink.hpp"
#include "identlink/diagnostics.hpp"
#include "identlink/errors.hpp"
#include "identlink/link.hpp"

namespace identlink {

namespace {

// Raw (beta, y) draws of one simulator; y is flattened to doubles.
struct GirSamples {
  std::size_t p = 0, m = 0;
  std::vector<double> beta;  // n x p
  std::vector<double> y;     // n x m
  std::size_t n = 0;

  void push(const Vector& b, const std::vector<double>& yy) {
    beta.insert(beta.end(), b.begin(), b.end());
    y.insert(y.end(), yy.begin(), yy.end());
    ++n;
  }
};

void mean_and_se(const Vector& series, double& mean, double& se) {
  mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(series.size());
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= static_cast<double>(series.size());
  bool constant = false;
  double ess = effective_sample_size(series, &constant);
  se = constant ? 0.0 : std::sqrt(var / ess);
}

GirRow compare_series(const std::string& name, const Vector& mc, const Vector& sc) {
  GirRow row;
  row.name = name;
  mean_and_se(mc, row.mc_mean, row.mc_se);
  mean_and_se(sc, row.sc_mean, row.sc_se);
  double denom = std::sqrt(row.mc_se * row.mc_se + row.sc_se * row.sc_se);
  if (denom == 0.0)
    row.z = row.mc_mean == row.sc_mean ? 0.0 : std::copysign(INFINITY, row.mc_mean - row.sc_mean);
  else
    row.z = (row.mc_mean - row.sc_mean) / denom;
  return row;
}

GirReport gir_compare(const GirSamples& mc, const GirSamples& sc,
                      const std::vector<std::string>& y_names) {
  GirReport report;
  report.n_outer = sc.n;
  if (sc.n == 0) return report;
  if (sc.n < 10) throw std::invalid_argument("getting_it_right: need at least 10 iterations");

  auto beta_series = [](const GirSamples& s, std::size_t k, bool squared) {
    Vector out(s.n);
    for (std::size_t t = 0; t < s.n; ++t) {
      double v = s.beta[t * s.p + k];
      out[t] = squared ? v * v : v;
    }
    return out;
  };
  auto y_series = [](const GirSamples& s, std::size_t i, bool squared) {
    Vector out(s.n);
    for (std::size_t t = 0; t < s.n; ++t) {
      double v = s.y[t * s.m + i];
      out[t] = squared ? v * v : v;
    }
    return out;
  };
  auto cross_series = [](const GirSamples& s, std::size_t k, std::size_t i) {
    Vector out(s.n);
    for (std::size_t t = 0; t < s.n; ++t) out[t] = s.beta[t * s.p + k] * s.y[t * s.m + i];
    return out;
  };

  for (std::size_t k = 0; k < mc.p; ++k) {
    std::string b = "beta_" + std::to_string(k);
    report.rows.push_back(compare_series(b, beta_series(mc, k, false), beta_series(sc, k, false)));
    report.rows.push_back(compare_series(b + "^2", beta_series(mc, k, true), beta_series(sc, k, true)));
  }
  for (std::size_t i = 0; i < mc.m; ++i) {
    const std::string& yn = y_names[i];
    report.rows.push_back(compare_series(yn, y_series(mc, i, false), y_series(sc, i, false)));
    report.rows.push_back(compare_series(yn + "^2", y_series(mc, i, true), y_series(sc, i, true)));
  }
  for (std::size_t k = 0; k < mc.p; ++k)
    for (std::size_t i = 0; i < mc.m; ++i)
      report.rows.push_back(compare_series("beta_" + std::to_string(k) + "*" + y_names[i],
                                           cross_series(mc, k, i), cross_series(sc, k, i)));
  return report;
}

Vector prior_draw(const GaussianPrior& prior, RngStream& rng) {
  PrecisionGaussian g{prior.precision, matvec(prior.precision, prior.mean)};
  return sample_mvn_precision(rng, g);
}

}  // namespace

GirReport getting_it_right_poisson(const PoissonData& skeleton, const GaussianPrior& prior,
                                   std::size_t n_outer, RngStream& rng, double u_rate_scale) {
  prior.validate();
  const std::size_t n = skeleton.n(), p = skeleton.p();
  PoissonData data = skeleton;

  auto draw_counts = [&](const Vector& beta) {
    std::vector<double> flat(n);
    for (std::size_t i = 0; i < n; ++i) {
      double mean = data.exposures[i] * link_lambda(dot(data.row(i), beta));
      data.counts[i] = sample_poisson(rng, mean);
      flat[i] = static_cast<double>(data.counts[i]);
    }
    return flat;
  };

  GirSamples mc, sc;
  mc.p = sc.p = p;
  mc.m = sc.m = n;

  for (std::size_t t = 0; t < n_outer; ++t) {
    Vector beta = prior_draw(prior, rng);
    mc.push(beta, draw_counts(beta));
  }

  PoissonChainState state;
  state.beta = prior_draw(prior, rng);
  std::vector<double> flat = draw_counts(state.beta);
  state.u.assign(n, 0.0);
  state.v.assign(n, 1.0);
  state.w.assign(n, 0.0);
  for (std::size_t t = 0; t < n_outer; ++t) {
    state = detail::gibbs_sweep_scaled_u(state, data, prior, rng, u_rate_scale);
    flat = draw_counts(state.beta);
    sc.push(state.beta, flat);
  }

  std::vector<std::string> y_names(n);
  for (std::size_t i = 0; i < n; ++i) y_names[i] = "y_" + std::to_string(i);
  return gir_compare(mc, sc, y_names);
}

GirReport getting_it_right_multinomial(const MultinomialData& skeleton,
                                       const GaussianPrior& prior, std::size_t n_outer,
                                       RngStream& rng) {
  prior.validate();
  MultinomialData data = skeleton;
  const std::size_t p = data.p;
  std::size_t m_flat = 0;
  for (const auto& o : data.obs) m_flat += o.counts.size();

  auto draw_counts = [&](const Vector& beta) {
    std::vector<double> flat;
    flat.reserve(m_flat);
    for (std::size_t i = 0; i < data.n(); ++i) {
      Vector probs = category_probs(beta, i, data);
      auto counts = sample_multinomial(rng, data.obs[i].trials, probs);
      data.obs[i].counts = counts;
      for (std::int64_t c : counts) flat.push_back(static_cast<double>(c));
    }
    return flat;
  };

  GirSamples mc, sc;
  mc.p = sc.p = p;
  mc.m = sc.m = m_flat;

  for (std::size_t t = 0; t < n_outer; ++t) {
    Vector beta = prior_draw(prior, rng);
    mc.push(beta, draw_counts(beta));
  }

  MultinomialChainState state =
      initial_state_multinomial(data, prior, InitSpec{InitSpec::Kind::PriorDraw, {}}, rng);
  draw_counts(state.beta);
  for (std::size_t t = 0; t < n_outer; ++t) {
    state = gibbs_sweep_multinomial(state, data, prior, rng);
    std::vector<double> flat = draw_counts(state.beta);
    sc.push(state.beta, flat);
  }

  std::vector<std::string> y_names;
  for (std::size_t i = 0; i < data.n(); ++i)
    for (std::size_t k = 0; k < data.obs[i].counts.size(); ++k)
      y_names.push_back("y_" + std::to_string(i) + "_" + std::to_string(k));
  return gir_compare(mc, sc, y_names);
}

GirReport getting_it_right_explink(const PoissonData& skeleton, const GaussianPrior& prior,
                                   double step, std::size_t n_inner, std::size_t n_outer,
                                   RngStream& rng) {
  prior.validate();
  if (!(step > 0.0)) throw std::domain_error("getting_it_right_explink: step must be positive");
  const std::size_t n = skeleton.n(), p = skeleton.p();
  PoissonData data = skeleton;

  auto draw_counts = [&](const Vector& gamma) {
    std::vector<double> flat(n);
    for (std::size_t i = 0; i < n; ++i) {
      double eta = std::min(dot(data.row(i), gamma), 700.0);
      data.counts[i] = sample_poisson(rng, data.exposures[i] * std::exp(eta));
      flat[i] = static_cast<double>(data.counts[i]);
    }
    return flat;
  };

  GirSamples mc, sc;
  mc.p = sc.p = p;
  mc.m = sc.m = n;

  for (std::size_t t = 0; t < n_outer; ++t) {
    Vector gamma = prior_draw(prior, rng);
    mc.push(gamma, draw_counts(gamma));
  }

  Vector gamma = prior_draw(prior, rng);
  draw_counts(gamma);
  for (std::size_t t = 0; t < n_outer; ++t) {
    double lp = explink_log_posterior(gamma, data, prior);
    for (std::size_t s = 0; s < n_inner; ++s) rwm_update(gamma, lp, step, data, prior, rng);
    std::vector<double> flat = draw_counts(gamma);
    sc.push(gamma, flat);
  }

  std::vector<std::string> y_names(n);
  for (std::size_t i = 0; i < n; ++i) y_names[i] = "y_" + std::to_string(i);
  return gir_compare(mc, sc, y_names);
}

GirReport getting_it_right(GirModel model, std::size_t n_outer, RngStream& rng,
                           bool corrupt_kernel) {
  switch (model) {
    case GirModel::PoissonLambda:
      return getting_it_right_poisson(gir_poisson_spec(), standard_prior(2), n_outer, rng,
                                      corrupt_kernel ? 0.5 : 1.0);
    case GirModel::MultinomialLambda:
      if (corrupt_kernel)
        throw std::invalid_argument("kernel corruption is only wired for the Poisson model");
      return getting_it_right_multinomial(gir_multinomial_spec(), standard_prior(2), n_outer,
                                          rng);
    case GirModel::PoissonExp:
      if (corrupt_kernel)
        throw std::invalid_argument("kernel corruption is only wired for the Poisson model");
      return getting_it_right_explink(gir_poisson_spec(), standard_prior(2), 0.8, 10, n_outer,
                                      rng);
  }
  throw std::logic_error("unreachable");
}

Vector sample_uhat(const PoissonData& data, const Vector& beta, std::size_t obs_index,
                   std::size_t n_draws, RngStream& rng) {
  if (obs_index >= data.n()) throw std::invalid_argument("sample_uhat: bad observation index");
  if (data.counts[obs_index] < 1)
    throw std::invalid_argument("sample_uhat: observation has zero count");
  LinkValue lv = link_eval(dot(data.row(obs_index), beta));
  Vector out(n_draws);
  double shape = static_cast<double>(data.counts[obs_index]);
  for (double& o : out) o = lv.b * sample_gamma(rng, shape, lv.b);
  return out;
}

std::vector<UhatKsRow> uhat_marginal_test(const PoissonData& data, const Vector& beta,
                                          std::size_t n_draws, RngStream& rng) {
  std::vector<UhatKsRow> rows;
  for (std::size_t i = 0; i < data.n(); ++i) {
    UhatKsRow row;
    row.obs_index = i;
    row.count = data.counts[i];
    row.low_power = n_draws < 1000;
    if (data.counts[i] < 1) {
      row.skipped_zero_count = true;
      rows.push_back(row);
      continue;
    }
    Vector uhat = sample_uhat(data, beta, i, n_draws, rng);
    std::int64_t y = data.counts[i];
    row.ks = ks_statistic(std::move(uhat), [y](double x) { return gamma_count_cdf(y, x); });
    rows.push_back(row);
  }
  return rows;
}

LatentBoundResult latent_bound_test(const PoissonData& data, const Vector& beta,
                                   std::size_t obs_index, BoundTestFunction h,
                                   std::size_t n_draws, RngStream& rng) {
  if (obs_index >= data.n())
    throw std::invalid_argument("latent_bound_test: bad observation index");
  if (data.counts[obs_index] < 1)
    throw std::invalid_argument("latent_bound_test: observation must have a positive count");
  LinkValue lv = link_eval(dot(data.row(obs_index), beta));
  double shape = static_cast<double>(data.counts[obs_index]);
  double half_exposure = 0.5 * data.exposures[obs_index];

  auto eval_h = [h](double t) {
    switch (h) {
      case BoundTestFunction::Square:
        return t * t;
      case BoundTestFunction::Abs:
        return std::abs(t);
      case BoundTestFunction::Fourth:
        return t * t * t * t;
    }
    return 0.0;
  };

  double sum = 0.0, sumsq = 0.0;
  for (std::size_t r = 0; r < n_draws; ++r) {
    double u = sample_gamma(rng, shape, lv.b);
    double c = (half_exposure + u) * lv.s;
    double v = sample_inverse_gaussian(rng, 1.0 / c, 1.0);
    double v_hat = c * v;
    double root = std::sqrt(v_hat);
    double t_hat = std::sqrt(c) * (root - 1.0 / root);
    double val = eval_h(t_hat);
    sum += val;
    sumsq += val * val;
  }
  double n = static_cast<double>(n_draws);
  LatentBoundResult res;
  res.lhs = sum / n;
  res.lhs_se = std::sqrt(std::max(0.0, (sumsq - n * res.lhs * res.lhs) / (n - 1.0)) / n);
  switch (h) {
    case BoundTestFunction::Square:
      res.rhs = 2.0;
      break;
    case BoundTestFunction::Abs:
      res.rhs = 2.0 * std::numbers::sqrt2 * std::numbers::inv_sqrtpi;
      break;
    case BoundTestFunction::Fourth:
      res.rhs = 6.0;
      break;
  }
  return res;
}

DriftReport empirical_drift(const PoissonData& data, const GaussianPrior& prior,
                            const Vector& norm_grid, std::size_t n_directions,
                            std::size_t n_mc, RngStream& rng) {
  prior.validate();
  if (n_directions == 0 || n_mc == 0)
    throw std::invalid_argument("empirical_drift: need directions and replicates");
  for (std::size_t g = 1; g < norm_grid.size(); ++g)
    if (!(norm_grid[g] > norm_grid[g - 1]))
      throw std::invalid_argument("empirical_drift: norm grid must be increasing");

  const std::size_t p = data.p();
  std::vector<Vector> directions(n_directions);
  for (auto& d : directions) {
    d.resize(p);
    double nrm = 0.0;
    do {
      for (double& x : d) x = rng.normal();
      nrm = norm2(d);
    } while (nrm < 1e-12);
    for (double& x : d) x /= nrm;
  }

  DriftReport report;
  for (std::size_t di = 0; di < n_directions; ++di) {
    for (double r : norm_grid) {
      DriftPoint pt;
      pt.radius = r;
      pt.direction = di;
      pt.beta0.resize(p);
      for (std::size_t j = 0; j < p; ++j) pt.beta0[j] = r * directions[di][j];
      pt.v = quad_form(prior.precision, pt.beta0);
      PoissonChainState state;
      state.beta = pt.beta0;
      state.u.assign(data.n(), 0.0);
      state.v.assign(data.n(), 1.0);
      state.w.assign(data.n(), 0.0);
      double sum = 0.0, sumsq = 0.0;
      try {
        for (std::size_t t = 0; t < n_mc; ++t) {
          PoissonChainState next = gibbs_sweep(state, data, prior, rng);
          double v1 = quad_form(prior.precision, next.beta);
          sum += v1;
          sumsq += v1 * v1;
        }
        double n = static_cast<double>(n_mc);
        pt.pv = sum / n;
        pt.pv_se = std::sqrt(std::max(0.0, (sumsq - n * pt.pv * pt.pv) / (n - 1.0)) / n);
        pt.ratio = pt.v > 0.0 ? pt.pv / pt.v : std::numeric_limits<double>::quiet_NaN();
      } catch (const numerical_error& e) {
        pt.ok = false;
        pt.note = e.what();
      }
      report.points.push_back(std::move(pt));
    }
  }
  return report;
}

PoissonData gir_poisson_spec() {
  Matrix x(3, 2);
  x(0, 0) = 1.0;  x(0, 1) = 0.5;
  x(1, 0) = 1.0;  x(1, 1) = -0.5;
  x(2, 0) = 0.5;  x(2, 1) = 1.0;
  return PoissonData(x, {0, 0, 0}, {1.0, 1.0, 1.0});
}

MultinomialData gir_multinomial_spec() {
  std::vector<MultinomialObservation> obs(3);
  auto fill = [](MultinomialObservation& o, std::initializer_list<double> cells) {
    o.trials = 2;
    o.counts = {2, 0, 0};
    o.covariates = Matrix(2, 2);
    auto it = cells.begin();
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t j = 0; j < 2; ++j) o.covariates(k, j) = *it++;
  };
  fill(obs[0], {1.0, 0.5, -0.5, 1.0});
  fill(obs[1], {1.0, -1.0, 0.5, 0.5});
  fill(obs[2], {-1.0, 0.3, 0.2, -0.8});
  return MultinomialData(std::move(obs), 2);
}

GaussianPrior standard_prior(std::size_t p) {
  return GaussianPrior{Vector(p, 0.0), Matrix::identity(p)};
}

PoissonData drift_test_design() {
  Matrix x(8, 2);
  const double rows[8][2] = {{1.0, 1.0},  {1.0, -1.0}, {-1.0, 1.0},  {1.0, 0.5},
                             {0.5, -1.0}, {-1.0, -0.5}, {1.0, 2.0},  {2.0, -1.0}};
  for (std::size_t i = 0; i < 8; ++i) {
    x(i, 0) = rows[i][0];
    x(i, 1) = rows[i][1];
  }
  return PoissonData(x, {2, 1, 3, 1, 2, 1, 4, 2}, Vector(8, 1.0));
}

PoissonData latent_probe_data() {
  Matrix x(6, 2);
  const double rows[6][2] = {{1.0, 0.5}, {1.0, -0.5}, {1.0, 1.0},
                             {-1.0, 0.5}, {0.5, -1.0}, {1.0, 2.0}};
  for (std::size_t i = 0; i < 6; ++i) {
    x(i, 0) = rows[i][0];
    x(i, 1) = rows[i][1];
  }
  return PoissonData(x, {1, 2, 3, 5, 1, 2}, {1.0, 2.0, 0.5, 1.0, 1.5, 1.0});
}

}  // namespace identlink
