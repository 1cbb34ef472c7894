// Acceptance suite: end-to-end checks of the sampling library at the
// tolerances the project commits to.  Each criterion prints one
// PASS/FAIL line; the binary exits nonzero if any fails.
//
//   acceptance_tests [--data-dir DIR] [--only N]

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "identlink/baseline_explink.hpp"
#include "identlink/cli.hpp"
#include "identlink/csv.hpp"
#include "identlink/diagnostics.hpp"
#include "identlink/link.hpp"
#include "identlink/poisson_model.hpp"
#include "identlink/rng.hpp"

using namespace identlink;
namespace fs = std::filesystem;

namespace {

std::string g_data_dir = "data";

// ---------------------------------------------------------------- 1
bool criterion_link_exactness(std::string& detail) {
  double worst_recip = 0.0, worst_round = 0.0;
  for (int k = -160; k <= 160; ++k) {
    double mag = std::pow(10.0, static_cast<double>(k) / 20.0);  // 1e-8 .. 1e8
    for (double xi : {mag, -mag}) {
      double err = std::abs(link_lambda(xi) * link_lambda(-xi) - 1.0);
      worst_recip = std::max(worst_recip, err);
    }
    double u = mag;
    double back = link_lambda(link_lambda_inv(u));
    worst_round = std::max(worst_round, std::abs(back - u) / u);
  }
  std::ostringstream os;
  os << "max |lambda(xi)lambda(-xi)-1| = " << worst_recip
     << ", max round-trip rel err = " << worst_round;
  detail = os.str();
  return worst_recip <= 1e-10 && worst_round <= 1e-10;
}

// ---------------------------------------------------------------- 2
bool criterion_ig_identity(std::string& detail) {
  std::ostringstream os;
  bool pass = true;
  RngStream rng(880001, 0);
  for (double kappa : {0.5, 1.0, 2.0}) {
    auto [est, se] = verify_ig_identity(rng, kappa, 1000000);
    double want = std::exp(-kappa);
    bool ok = std::abs(est - want) <= 3.0 * se;
    pass = pass && ok;
    os << "kappa=" << kappa << ": " << est << " vs " << want << " (se " << se << ") ";
  }
  detail = os.str();
  return pass;
}

// ---------------------------------------------------------------- 3
bool criterion_getting_it_right(std::string& detail) {
  const std::size_t n_outer = 200000;
  std::ostringstream os;
  bool pass = true;

  struct Case {
    GirModel model;
    const char* name;
    std::uint64_t seed;
  };
  for (const Case& c : {Case{GirModel::PoissonLambda, "poisson-lambda", 990101},
                        Case{GirModel::MultinomialLambda, "multinomial-lambda", 990102},
                        Case{GirModel::PoissonExp, "poisson-exp", 990103}}) {
    RngStream rng(c.seed, 0);
    GirReport r = getting_it_right(c.model, n_outer, rng);
    bool ok = r.all_within(3.0);
    pass = pass && ok;
    os << c.name << " max|z|=" << r.max_abs_z() << (ok ? " ok; " : " FAIL; ");
  }

  RngStream rng(990104, 0);
  GirReport corrupted = getting_it_right(GirModel::PoissonLambda, n_outer, rng, true);
  bool detected = corrupted.max_abs_z() > 5.0;
  pass = pass && detected;
  os << "corrupted kernel max|z|=" << corrupted.max_abs_z()
     << (detected ? " detected" : " NOT DETECTED");
  detail = os.str();
  return pass;
}

// shared beta probes for criteria 4 and 5
std::vector<Vector> beta_probes(std::size_t p, RngStream& rng) {
  std::vector<Vector> probes;
  for (double r : {0.0, 3.0, 30.0}) {
    Vector beta(p, 0.0);
    if (r > 0.0) {
      double nrm = 0.0;
      do {
        for (double& x : beta) x = rng.normal();
        nrm = norm2(beta);
      } while (nrm < 1e-12);
      for (double& x : beta) x *= r / nrm;
    }
    probes.push_back(std::move(beta));
  }
  return probes;
}

// ---------------------------------------------------------------- 4
bool criterion_uhat_marginal(std::string& detail) {
  PoissonData data = latent_probe_data();
  RngStream rng(440001, 0);
  auto probes = beta_probes(data.p(), rng);
  const std::size_t n_draws = 100000;
  const std::size_t n_tests = probes.size() * data.n();
  double crit = ks_critical_value(0.01 / static_cast<double>(n_tests), n_draws);
  double worst = 0.0;
  bool pass = true;
  for (const Vector& beta : probes) {
    auto rows = uhat_marginal_test(data, beta, n_draws, rng);
    for (const auto& row : rows) {
      if (row.skipped_zero_count) continue;
      worst = std::max(worst, row.ks);
      pass = pass && row.ks <= crit;
    }
  }
  std::ostringstream os;
  os << n_tests << " KS tests, worst D = " << worst << ", Bonferroni critical = " << crit;
  detail = os.str();
  return pass;
}

// ---------------------------------------------------------------- 5
bool criterion_latent_bound(std::string& detail) {
  PoissonData data = latent_probe_data();
  RngStream rng(550001, 0);
  auto probes = beta_probes(data.p(), rng);
  const std::size_t n_draws = 100000;
  bool pass = true;
  double worst_margin = INFINITY;
  for (const Vector& beta : probes)
    for (std::size_t i = 0; i < data.n(); ++i)
      for (BoundTestFunction h :
           {BoundTestFunction::Square, BoundTestFunction::Abs, BoundTestFunction::Fourth}) {
        LatentBoundResult res = latent_bound_test(data, beta, i, h, n_draws, rng);
        pass = pass && res.holds();
        worst_margin = std::min(worst_margin, res.rhs + 3.0 * res.lhs_se - res.lhs);
      }
  std::ostringstream os;
  os << probes.size() * data.n() * 3 << " bounds, smallest slack (rhs + 3se - lhs) = "
     << worst_margin;
  detail = os.str();
  return pass;
}

// ---------------------------------------------------------------- 6
bool criterion_drift(std::string& detail) {
  PoissonData data = drift_test_design();
  GaussianPrior prior = standard_prior(data.p());
  RngStream rng(660001, 0);
  DriftReport report = empirical_drift(data, prior, {1000.0}, 3, 10000, rng);
  bool pass = true;
  double worst_ratio = 0.0;
  for (const auto& p : report.points) {
    bool ok = p.ok && p.v > 0.0 && p.pv + 3.0 * p.pv_se < p.v;
    pass = pass && ok;
    worst_ratio = std::max(worst_ratio, p.ratio + 3.0 * p.pv_se / p.v);
  }
  std::ostringstream os;
  os << report.points.size() << " directions at |beta| = 1000, worst (PV + 3se)/V = "
     << worst_ratio;
  detail = os.str();
  return pass;
}

// ---------------------------------------------------------------- 7
bool criterion_reproductive(std::string& detail) {
  Matrix x(6, 2);
  const double rows[6][2] = {{1.0, 1.0}, {1.0, 1.0}, {1.0, 2.0},
                             {1.0, 2.0}, {1.0, 3.0}, {0.5, 1.0}};
  for (int i = 0; i < 6; ++i) {
    x(i, 0) = rows[i][0];
    x(i, 1) = rows[i][1];
  }
  PoissonData data(x, {2, 3, 1, 4, 2, 1}, {1.0, 2.0, 1.0, 1.0, 1.0, 1.0});
  PoissonData collapsed = collapse_duplicates(data);

  GaussianPrior prior = standard_prior(2);
  SamplerConfig cfg;
  cfg.burn_in = 2000;
  cfg.keep = 50000;
  cfg.seed = 770001;
  DrawMatrix d_orig = run_chains(data, prior, cfg);
  cfg.seed = 770002;
  DrawMatrix d_coll = run_chains(collapsed, prior, cfg);
  ChainSummary s_orig = summarize(d_orig);
  ChainSummary s_coll = summarize(d_coll);

  bool pass = collapsed.n() == 4;
  std::ostringstream os;
  os << "collapsed " << data.n() << " -> " << collapsed.n() << " rows;";
  for (std::size_t j = 0; j < 2; ++j) {
    double diff = std::abs(s_orig.coords[j].mean - s_coll.coords[j].mean);
    double tol = 3.0 * std::sqrt(s_orig.coords[j].mcse * s_orig.coords[j].mcse +
                                 s_coll.coords[j].mcse * s_coll.coords[j].mcse);
    pass = pass && diff <= tol;
    os << " beta_" << j << ": |diff| = " << diff << " vs " << tol;
  }
  detail = os.str();
  return pass;
}

// ---------------------------------------------------------------- 8
bool criterion_sparrow(std::string& detail) {
  fs::path real = fs::path(g_data_dir) / "sparrow_real.csv";
  fs::path synth = fs::path(g_data_dir) / "sparrow_synthetic.csv";
  fs::path used = fs::exists(real) ? real : synth;
  if (!fs::exists(used)) {
    detail = "no sparrow dataset found under " + g_data_dir;
    return false;
  }
  PoissonData data = read_poisson_csv(used.string());

  GaussianPrior prior{Vector(3, 0.0), Matrix::diagonal(Vector(3, 0.01))};
  SamplerConfig cfg;
  cfg.burn_in = 5000;
  cfg.keep = 5000;
  cfg.seed = 880088;
  DrawMatrix lambda_draws = run_chains(data, prior, cfg);

  MhConfig mh;
  mh.burn_in = 5000;
  mh.keep = 5000;
  mh.seed = 880099;
  mh.initial_step = 0.1;
  DrawMatrix exp_draws = run_mh_chain(data, prior, mh);

  // group means by age (the second design column)
  std::ostringstream os;
  os << (used == real ? "real data" : "synthetic stand-in") << ";";
  bool pass = true;
  for (int age = 1; age <= 5; ++age) {
    Vector x_new{1.0, static_cast<double>(age), static_cast<double>(age * age)};
    PredictiveDraws lam = posterior_predictive_mean(lambda_draws, x_new, 1.0);
    double expm = 0.0;
    for (std::size_t r = 0; r < exp_draws.rows(); ++r) {
      double eta = 0.0;
      for (std::size_t j = 0; j < 3; ++j) eta += exp_draws.at(r, j) * x_new[j];
      expm += std::exp(std::min(eta, 700.0));
    }
    expm /= static_cast<double>(exp_draws.rows());

    double gap = std::abs(lam.mean - expm);
    bool ok = gap <= 0.15;
    pass = pass && ok;
    os << " x=" << age << ": lambda " << lam.mean << " vs exp " << expm;

    if (age <= 4) {
      double ysum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < data.n(); ++i)
        if (data.design(i, 1) == static_cast<double>(age)) {
          ysum += static_cast<double>(data.counts[i]);
          ++count;
        }
      double observed = ysum / static_cast<double>(count);
      bool track = std::abs(lam.mean - observed) <= 0.3 && std::abs(expm - observed) <= 0.3;
      pass = pass && track;
      os << " (obs " << observed << ")";
    }
    os << ";";
  }
  detail = os.str();
  return pass;
}

// ---------------------------------------------------------------- 9
bool criterion_determinism(std::string& detail) {
  fs::path synth = fs::path(g_data_dir) / "sparrow_synthetic.csv";
  if (!fs::exists(synth)) {
    detail = "missing " + synth.string();
    return false;
  }
  fs::path base = fs::current_path() / "acceptance_tmp";
  fs::create_directories(base / "a");
  fs::create_directories(base / "b");
  std::ofstream cfg_file(base / "cfg.txt");
  cfg_file << "model = poisson-lambda\nburn_in = 200\nkeep = 500\nseed = 99\n"
              "prior_precision = 0.01\ndata = " << synth.string() << "\n";
  cfg_file.close();

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  int rc1 = cli_dispatch({"fit", "--config", (base / "cfg.txt").string(), "--out-dir",
                          (base / "a").string()});
  int rc2 = cli_dispatch({"fit", "--config", (base / "cfg.txt").string(), "--out-dir",
                          (base / "b").string()});
  if (rc1 != 0 || rc2 != 0) {
    detail = "fit runs failed";
    return false;
  }
  std::string da = slurp(base / "a" / "draws.csv");
  std::string db = slurp(base / "b" / "draws.csv");
  detail = "draws.csv bytes: " + std::to_string(da.size());
  return !da.empty() && da == db;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--data-dir" && i + 1 < argc) g_data_dir = argv[++i];
    if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> fn;
  };
  std::vector<Criterion> criteria = {
      {1, "link exactness on log-spaced grids", criterion_link_exactness},
      {2, "inverse Gaussian normalizing identity", criterion_ig_identity},
      {3, "getting-it-right for all three kernels", criterion_getting_it_right},
      {4, "rescaled gamma latent marginal law", criterion_uhat_marginal},
      {5, "normalized latent moment bound", criterion_latent_bound},
      {6, "energy drift contraction at large norm", criterion_drift},
      {7, "duplicate-row collapse preserves the posterior", criterion_reproductive},
      {8, "sparrow replication: lambda vs exp link", criterion_sparrow},
      {9, "seeded runs are byte-identical", criterion_determinism},
  };

  bool all = true;
  for (auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s — %s\n", ok ? "PASS" : "FAIL", c.id, c.name,
                detail.c_str());
    std::fflush(stdout);
    all = all && ok;
  }
  return all ? 0 : 1;
}
