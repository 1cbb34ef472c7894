#include "identlink/poisson_model.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "identlink/diagnostics.hpp"
#include "identlink/link.hpp"

using namespace identlink;

namespace {

PoissonData one_obs(double x, std::int64_t y, double exposure) {
  Matrix design(1, 1);
  design(0, 0) = x;
  return PoissonData(design, {y}, {exposure});
}

}  // namespace

TEST_CASE("data validation at construction") {
  CHECK_THROWS_AS(PoissonData(Matrix(0, 1), {}, {}), std::invalid_argument);
  Matrix x(1, 1);
  x(0, 0) = 1.0;
  CHECK_THROWS_AS(PoissonData(x, {-1}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PoissonData(x, {1}, {0.0}), std::invalid_argument);
  Matrix bad(1, 1);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(PoissonData(bad, {1}, {1.0}), std::invalid_argument);
}

TEST_CASE("log likelihood reference values") {
  // beta = 0, y = 1, n = 1: log lambda(0) - lambda(0) - log 1! = -1
  CHECK(log_likelihood({0.0}, one_obs(1.0, 1, 1.0)) == doctest::Approx(-1.0).epsilon(1e-14));
  // x'beta = 1.5 so lambda = 2: 2 log 2 - 2 - log 2 = log 2 - 2
  CHECK(log_likelihood({1.5}, one_obs(1.0, 2, 1.0)) ==
        doctest::Approx(std::log(2.0) - 2.0).epsilon(1e-14));
}

TEST_CASE("log likelihood is additive over observations") {
  Matrix xa(2, 2), xb(3, 2), xc(5, 2);
  std::vector<std::int64_t> ya{1, 0}, yb{2, 5, 1}, yc;
  Vector ea{1.0, 2.0}, eb{0.5, 1.0, 3.0}, ec;
  double cells_a[2][2] = {{1.0, -0.3}, {1.0, 0.8}};
  double cells_b[3][2] = {{1.0, 1.2}, {0.4, -2.0}, {1.0, 0.0}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) xa(i, j) = cells_a[i][j];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) xb(i, j) = cells_b[i][j];
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 2; ++j) xc(i, j) = i < 2 ? cells_a[i][j] : cells_b[i - 2][j];
  yc = {1, 0, 2, 5, 1};
  ec = {1.0, 2.0, 0.5, 1.0, 3.0};
  Vector beta{0.3, -0.7};
  double la = log_likelihood(beta, PoissonData(xa, ya, ea));
  double lb = log_likelihood(beta, PoissonData(xb, yb, eb));
  double lc = log_likelihood(beta, PoissonData(xc, yc, ec));
  CHECK(lc == doctest::Approx(la + lb).epsilon(1e-13));
}

TEST_CASE("scalar beta conditional matches the hand-derived Gaussian") {
  // p = 1, one observation, Psi = 1, mu = 0, fixed latents:
  // precision 1 + w x^2, mean (u - n/2) x / (1 + w x^2)
  PoissonData data = one_obs(0.7, 3, 2.0);
  GaussianPrior prior{{0.0}, Matrix::identity(1)};
  double u = 1.9, w = 0.6;
  PrecisionGaussian g = beta_conditional(data, prior, {u}, {w});
  double want_prec = 1.0 + w * 0.7 * 0.7;
  double want_mean = (u - 1.0) * 0.7 / want_prec;
  CHECK(g.precision(0, 0) == doctest::Approx(want_prec).epsilon(1e-14));
  CHECK(g.shift[0] / g.precision(0, 0) == doctest::Approx(want_mean).epsilon(1e-14));

  RngStream rng(11, 0);
  const std::size_t n = 100000;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double b = sample_mvn_precision(rng, g)[0];
    s1 += b;
    s2 += b * b;
  }
  double m = s1 / n, var = s2 / n - m * m;
  double sd = std::sqrt(1.0 / want_prec);
  CHECK(std::abs(m - want_mean) <= 3.0 * sd / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - sd * sd) <= 3.0 * sd * sd * std::sqrt(2.0 / n));
}

TEST_CASE("sweep invariants: zero counts pin u, w ties to v") {
  Matrix x(4, 2);
  double cells[4][2] = {{1.0, 0.2}, {1.0, -1.0}, {0.3, 0.9}, {1.0, 2.0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) x(i, j) = cells[i][j];
  PoissonData data(x, {0, 3, 0, 2}, {1.0, 1.0, 2.0, 0.5});
  GaussianPrior prior{{0.0, 0.0}, Matrix::identity(2)};
  RngStream rng(21, 0);
  PoissonChainState state = initial_state(data, prior, InitSpec{InitSpec::Kind::PriorDraw, {}}, rng);
  for (int sweep = 0; sweep < 50; ++sweep) {
    state = gibbs_sweep(state, data, prior, rng);
    for (std::size_t i = 0; i < data.n(); ++i) {
      if (data.counts[i] == 0)
        CHECK(state.u[i] == 0.0);
      else
        CHECK(state.u[i] > 0.0);
      CHECK(state.v[i] > 0.0);
      double a = 0.5 * data.exposures[i] + state.u[i];
      CHECK(std::abs(state.w[i] - state.v[i] * a * a) <= 1e-12 * state.w[i]);
    }
  }
}

TEST_CASE("all-zero counts: the u contribution vanishes from the shift") {
  Matrix x(2, 2);
  x(0, 0) = 1.0;
  x(0, 1) = 0.5;
  x(1, 0) = 1.0;
  x(1, 1) = -0.5;
  PoissonData data(x, {0, 0}, {1.0, 3.0});
  GaussianPrior prior{{0.4, -0.2}, Matrix::diagonal({2.0, 5.0})};
  Vector u(2, 0.0), w{0.7, 0.1};
  PrecisionGaussian g = beta_conditional(data, prior, u, w);
  // shift must equal Psi mu - X' n/2 exactly
  Vector want = matvec(prior.precision, prior.mean);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) want[j] -= x(i, j) * 0.5 * data.exposures[i];
  CHECK(g.shift[0] == doctest::Approx(want[0]).epsilon(1e-14));
  CHECK(g.shift[1] == doctest::Approx(want[1]).epsilon(1e-14));
}

TEST_CASE("conditional conjugacy: empirical moments of the beta redraw") {
  PoissonData data = drift_test_design();
  GaussianPrior prior = standard_prior(2);
  // fix latents from one sweep
  RngStream rng(33, 0);
  PoissonChainState state = initial_state(data, prior, InitSpec{InitSpec::Kind::Zero, {}}, rng);
  state = gibbs_sweep(state, data, prior, rng);
  PrecisionGaussian g = beta_conditional(data, prior, state.u, state.w);
  Matrix l = cholesky(g.precision);
  Vector want_mean = chol_solve(l, g.shift);
  Matrix cov(2, 2);
  for (std::size_t j = 0; j < 2; ++j) {
    Vector e(2, 0.0);
    e[j] = 1.0;
    Vector col = chol_solve(l, e);
    for (std::size_t i = 0; i < 2; ++i) cov(i, j) = col[i];
  }
  const std::size_t n = 100000;
  Vector mean(2, 0.0);
  Matrix second(2, 2);
  for (std::size_t t = 0; t < n; ++t) {
    Vector b = sample_mvn_precision(rng, g);
    for (std::size_t i = 0; i < 2; ++i) {
      mean[i] += b[i];
      for (std::size_t j = 0; j < 2; ++j) second(i, j) += b[i] * b[j];
    }
  }
  for (std::size_t i = 0; i < 2; ++i) {
    mean[i] /= n;
    CHECK(std::abs(mean[i] - want_mean[i]) <=
          3.0 * std::sqrt(cov(i, i) / static_cast<double>(n)));
  }
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double c = second(i, j) / n - mean[i] * mean[j];
      double scale = std::sqrt(cov(i, i) * cov(j, j));
      CHECK(std::abs(c - cov(i, j)) <= 3.0 * 2.0 * scale / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("run_chains bookkeeping and determinism") {
  PoissonData data = drift_test_design();
  GaussianPrior prior = standard_prior(2);
  SamplerConfig cfg;
  cfg.burn_in = 50;
  cfg.keep = 100;
  cfg.thin = 2;
  cfg.n_chains = 2;
  cfg.seed = 77;
  DrawMatrix a = run_chains(data, prior, cfg);
  CHECK(a.rows() == 200);
  CHECK(a.n_params == 2);
  std::size_t chain0 = 0;
  for (auto c : a.chain) chain0 += c == 0 ? 1 : 0;
  CHECK(chain0 == 100);
  DrawMatrix b = run_chains(data, prior, cfg);
  CHECK(a.values == b.values);
  CHECK(a.chain == b.chain);
  CHECK(a.sweep == b.sweep);

  cfg.store_latents = true;
  DrawMatrix c = run_chains(data, prior, cfg);
  CHECK(c.n_latent == data.n());
  CHECK(c.latent_u.size() == c.rows() * data.n());
  CHECK(c.latent_v.size() == c.rows() * data.n());
}

TEST_CASE("posterior predictive mean basics") {
  DrawMatrix draws;
  draws.n_params = 2;
  draws.param_names = {"beta_0", "beta_1"};
  draws.n_chains = 1;
  SUBCASE("all-zero draws give the baseline mean") {
    for (int r = 0; r < 5; ++r) {
      draws.values.insert(draws.values.end(), {0.0, 0.0});
      draws.chain.push_back(0);
      draws.sweep.push_back(r);
    }
    PredictiveDraws out = posterior_predictive_mean(draws, {1.0, 2.0}, 1.0);
    for (double v : out.values) CHECK(v == doctest::Approx(1.0));
    CHECK(out.mean == doctest::Approx(1.0));
  }
  SUBCASE("single draw at the lambda(1.5) = 2 point, exposure 2") {
    draws.values = {1.5, 0.0};
    draws.chain = {0};
    draws.sweep = {1};
    PredictiveDraws out = posterior_predictive_mean(draws, {1.0, 0.0}, 2.0);
    CHECK(out.values[0] == doctest::Approx(4.0).epsilon(1e-14));
  }
}

TEST_CASE("collapse_duplicates") {
  SUBCASE("no duplicates is the identity") {
    PoissonData data = drift_test_design();
    PoissonData out = collapse_duplicates(data);
    CHECK(out.n() == data.n());
    CHECK(out.design == data.design);
    CHECK(out.counts == data.counts);
  }
  SUBCASE("identical rows merge counts and exposures") {
    Matrix x(3, 2);
    x(0, 0) = 1.0;
    x(0, 1) = 2.0;
    x(1, 0) = 1.0;
    x(1, 1) = 2.0;
    x(2, 0) = 0.0;
    x(2, 1) = 1.0;
    PoissonData data(x, {1, 2, 5}, {1.0, 1.0, 2.0});
    PoissonData out = collapse_duplicates(data);
    REQUIRE(out.n() == 2);
    CHECK(out.counts[0] == 3);
    CHECK(out.exposures[0] == doctest::Approx(2.0));
    CHECK(out.counts[1] == 5);
  }
}

TEST_CASE("collapsed and original data give the same posterior") {
  // smaller-scale version of the reproductive-property equivalence
  Matrix x(4, 2);
  double cells[4][2] = {{1.0, 0.5}, {1.0, 0.5}, {1.0, -0.5}, {0.5, 1.0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) x(i, j) = cells[i][j];
  PoissonData data(x, {2, 3, 1, 4}, {1.0, 2.0, 1.0, 1.0});
  PoissonData collapsed = collapse_duplicates(data);
  REQUIRE(collapsed.n() == 3);
  GaussianPrior prior = standard_prior(2);
  SamplerConfig cfg;
  cfg.burn_in = 500;
  cfg.keep = 8000;
  cfg.seed = 2025;
  DrawMatrix d_orig = run_chains(data, prior, cfg);
  cfg.seed = 2026;
  DrawMatrix d_coll = run_chains(collapsed, prior, cfg);
  ChainSummary s_orig = summarize(d_orig);
  ChainSummary s_coll = summarize(d_coll);
  for (std::size_t j = 0; j < 2; ++j) {
    double tol = 3.0 * std::sqrt(s_orig.coords[j].mcse * s_orig.coords[j].mcse +
                                 s_coll.coords[j].mcse * s_coll.coords[j].mcse);
    CHECK(std::abs(s_orig.coords[j].mean - s_coll.coords[j].mean) <= tol);
  }
}
