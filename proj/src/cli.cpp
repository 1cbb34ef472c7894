#include "identlink/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "identlink/baseline_explink.hpp"
#include "identlink/config.hpp"
#include "identlink/csv.hpp"
#include "identlink/diagnostics.hpp"
#include "identlink/errors.hpp"
#include "identlink/link.hpp"
#include "identlink/svg.hpp"

namespace identlink {

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string model;
  std::string data;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config_path, "config file with key = value lines");
  sub->add_option("--seed", o.seed, "root RNG seed (overrides config)");
  sub->add_option("--out-dir", o.out_dir, "output directory (overrides config and IDENTLINK_OUT_DIR)");
  sub->add_option("--model", o.model, "poisson-lambda | poisson-exp | multinomial-lambda");
  sub->add_option("--data", o.data, "dataset CSV (overrides config)");
}

RunConfig build_config(const CommonOpts& o) {
  RunConfig cfg;
  if (const char* env = std::getenv("IDENTLINK_OUT_DIR"); env && *env) cfg.out_dir = env;
  if (!o.config_path.empty()) load_config_file(o.config_path, cfg);
  if (o.seed) cfg.sampler.seed = *o.seed;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (!o.model.empty()) apply_config_key(cfg, "model", o.model);
  if (!o.data.empty()) cfg.data_path = o.data;
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

std::string joined(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

Vector parse_beta_flag(const std::string& s) {
  Vector out;
  std::string cur;
  for (char ch : s + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (out.empty()) throw parse_error("--beta needs a comma-separated list");
  return out;
}

int run_fit(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw parse_error("fit: no dataset given (config key 'data' or --data)");
  DrawMatrix draws;
  if (cfg.model == "multinomial-lambda") {
    MultinomialData data = read_multinomial_csv(cfg.data_path);
    GaussianPrior prior = resolve_prior(cfg, data.p);
    draws = run_chains_multinomial(data, prior, cfg.sampler);
  } else {
    PoissonData data = read_poisson_csv(cfg.data_path);
    GaussianPrior prior = resolve_prior(cfg, data.p());
    if (cfg.model == "poisson-lambda")
      draws = run_chains(data, prior, cfg.sampler);
    else
      draws = run_mh_chain(data, prior, make_mh_config(cfg));
  }
  write_draws(draws, joined(cfg.out_dir, "draws.csv"));
  ChainSummary summary = summarize(draws);
  write_summary_csv(summary, joined(cfg.out_dir, "summary.csv"));
  write_summary_text(summary, joined(cfg.out_dir, "summary.txt"));
  std::cout << "fit: " << draws.rows() << " draws (" << cfg.model << ") -> "
            << joined(cfg.out_dir, "draws.csv") << '\n';
  if (!draws.mh_acceptance_rates.empty()) {
    std::cout << "acceptance:";
    for (double a : draws.mh_acceptance_rates) std::cout << ' ' << a;
    std::cout << '\n';
  }
  return 0;
}

int run_predict(const RunConfig& cfg, const std::string& draws_path) {
  if (draws_path.empty()) throw parse_error("predict: --draws is required");
  if (cfg.data_path.empty()) throw parse_error("predict: --data is required");
  DrawMatrix draws = read_draws(draws_path);
  CovariateTable table = read_covariates_csv(cfg.data_path);
  if (table.design.cols() != draws.n_params)
    throw parse_error("predict: data has " + std::to_string(table.design.cols()) +
                      " design columns, draws have " + std::to_string(draws.n_params));
  bool exp_link = cfg.model == "poisson-exp";
  std::string out_path = joined(cfg.out_dir, "predictive.csv");
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << "row,mean,q2.5,q50,q97.5\n";
  for (std::size_t i = 0; i < table.design.rows(); ++i) {
    Vector x(table.design.cols());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = table.design(i, j);
    Vector values(draws.rows());
    for (std::size_t r = 0; r < draws.rows(); ++r) {
      double eta = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) eta += draws.at(r, j) * x[j];
      values[r] = table.exposures[i] *
                  (exp_link ? std::exp(std::min(eta, 700.0)) : link_lambda(eta));
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    out << (i + 1) << ',' << mean << ',' << quantile(values, 0.025) << ','
        << quantile(values, 0.5) << ',' << quantile(values, 0.975) << '\n';
  }
  std::cout << "predict: " << table.design.rows() << " rows -> " << out_path << '\n';
  return 0;
}

struct GroupPanelData {
  double group_value;
  Vector x_row;
  double exposure;
  double observed_mean;
};

std::vector<GroupPanelData> group_rows(const PoissonData& data, const CovariateTable& table,
                                       const std::string& group_column) {
  std::ptrdiff_t gcol = -1;
  for (std::size_t j = 0; j < table.column_names.size(); ++j)
    if (table.column_names[j] == group_column) gcol = static_cast<std::ptrdiff_t>(j);
  if (gcol < 0) throw parse_error("compare: group column '" + group_column + "' not found");
  std::map<double, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < data.n(); ++i) groups[data.design(i, gcol)].push_back(i);
  std::vector<GroupPanelData> out;
  for (const auto& [value, members] : groups) {
    GroupPanelData g;
    g.group_value = value;
    g.x_row = data.row(members.front());
    g.exposure = data.exposures[members.front()];
    double ysum = 0.0;
    for (std::size_t i : members) ysum += static_cast<double>(data.counts[i]);
    g.observed_mean = ysum / static_cast<double>(members.size());
    out.push_back(std::move(g));
  }
  return out;
}

int run_compare(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw parse_error("compare: no dataset given");
  PoissonData data = read_poisson_csv(cfg.data_path);
  CovariateTable table = read_covariates_csv(cfg.data_path);
  GaussianPrior prior = resolve_prior(cfg, data.p());

  DrawMatrix lambda_draws = run_chains(data, prior, cfg.sampler);
  DrawMatrix exp_draws = run_mh_chain(data, prior, make_mh_config(cfg));

  write_draws(lambda_draws, joined(cfg.out_dir, "draws_lambda.csv"));
  write_draws(exp_draws, joined(cfg.out_dir, "draws_exp.csv"));
  ChainSummary sum_lambda = summarize(lambda_draws);
  ChainSummary sum_exp = summarize(exp_draws);
  write_summary_csv(sum_lambda, joined(cfg.out_dir, "summary_lambda.csv"));
  write_summary_text(sum_lambda, joined(cfg.out_dir, "summary_lambda.txt"));
  write_summary_csv(sum_exp, joined(cfg.out_dir, "summary_exp.csv"));
  write_summary_text(sum_exp, joined(cfg.out_dir, "summary_exp.txt"));

  {
    std::string path = joined(cfg.out_dir, "ess_comparison.csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "coordinate,ess_lambda_link,ess_exp_link\n";
    for (std::size_t j = 0; j < sum_lambda.coords.size(); ++j)
      out << j << ',' << sum_lambda.coords[j].ess << ',' << sum_exp.coords[j].ess << '\n';
  }

  std::string group_column = cfg.group_column;
  if (group_column.empty()) {
    bool has_age = std::find(table.column_names.begin(), table.column_names.end(), "age") !=
                   table.column_names.end();
    if (!has_age)
      throw parse_error("compare: set group_column (no 'age' column to default to)");
    group_column = "age";
  }
  auto groups = group_rows(data, table, group_column);

  std::vector<DensityPanel> panels;
  for (const auto& g : groups) {
    PredictiveDraws lam = posterior_predictive_mean(lambda_draws, g.x_row, g.exposure);
    Vector expv(exp_draws.rows());
    double expm = 0.0;
    for (std::size_t r = 0; r < exp_draws.rows(); ++r) {
      double eta = 0.0;
      for (std::size_t j = 0; j < g.x_row.size(); ++j) eta += exp_draws.at(r, j) * g.x_row[j];
      expv[r] = g.exposure * std::exp(std::min(eta, 700.0));
      expm += expv[r];
    }
    expm /= static_cast<double>(exp_draws.rows());

    char label[96];
    std::snprintf(label, sizeof label, "%s = %g, lambda link", group_column.c_str(),
                  g.group_value);
    panels.push_back(DensityPanel{label, lam.values, lam.mean, g.observed_mean});
    std::snprintf(label, sizeof label, "%s = %g, exp link", group_column.c_str(), g.group_value);
    panels.push_back(DensityPanel{label, std::move(expv), expm, g.observed_mean});
  }
  emit_density_svg(panels, 2, "posterior predictive conditional means",
                   joined(cfg.out_dir, "compare.svg"));
  std::cout << "compare: " << groups.size() << " groups -> " << joined(cfg.out_dir, "compare.svg")
            << '\n';
  return 0;
}

int run_validate(const RunConfig& cfg, std::size_t outer, bool corrupt) {
  GirModel model;
  if (cfg.model == "poisson-lambda")
    model = GirModel::PoissonLambda;
  else if (cfg.model == "multinomial-lambda")
    model = GirModel::MultinomialLambda;
  else
    model = GirModel::PoissonExp;
  RngStream rng(cfg.sampler.seed, 0);
  GirReport report = getting_it_right(model, outer, rng, corrupt);
  write_gir_report_csv(report, joined(cfg.out_dir, "gir_report.csv"));
  write_gir_report_text(report, joined(cfg.out_dir, "gir_report.txt"));
  bool pass = report.all_within(3.0);
  std::cout << "validate (" << cfg.model << ", " << outer << " iterations): max |z| = "
            << report.max_abs_z() << " -> " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? 0 : 1;
}

int run_drift_check(const RunConfig& cfg, const std::string& norms_flag,
                    std::size_t n_directions, std::size_t n_mc) {
  PoissonData data = cfg.data_path.empty() ? drift_test_design() : read_poisson_csv(cfg.data_path);
  GaussianPrior prior = resolve_prior(cfg, data.p());
  Vector norms = parse_beta_flag(norms_flag);
  RngStream rng(cfg.sampler.seed, 0);
  DriftReport report = empirical_drift(data, prior, norms, n_directions, n_mc, rng);
  write_drift_report_csv(report, joined(cfg.out_dir, "drift_report.csv"));
  write_drift_report_text(report, joined(cfg.out_dir, "drift_report.txt"));

  // Pass when at the largest norm every direction has PV below V by
  // at least 3 standard errors.
  double rmax = norms.back();
  bool pass = true;
  for (const auto& p : report.points)
    if (p.radius == rmax) pass = pass && p.ok && p.v > 0.0 && p.pv + 3.0 * p.pv_se < p.v;
  std::cout << "drift-check: largest norm " << rmax << " -> " << (pass ? "PASS" : "FAIL")
            << " (report in " << cfg.out_dir << ")\n";
  return pass ? 0 : 1;
}

int run_lemma_check(const RunConfig& cfg, std::size_t n_draws, const std::string& norms_flag) {
  PoissonData data = cfg.data_path.empty() ? latent_probe_data() : read_poisson_csv(cfg.data_path);
  Vector norms = parse_beta_flag(norms_flag);
  RngStream rng(cfg.sampler.seed, 0);
  const std::size_t p = data.p();

  struct ProbePoint {
    double radius;
    Vector beta;
  };
  std::vector<ProbePoint> points;
  for (double r : norms) {
    Vector beta(p, 0.0);
    if (r > 0.0) {
      double nrm = 0.0;
      do {
        for (double& x : beta) x = rng.normal();
        nrm = norm2(beta);
      } while (nrm < 1e-12);
      for (double& x : beta) x *= r / nrm;
    }
    points.push_back({r, std::move(beta)});
  }

  std::string path = joined(cfg.out_dir, "lemma_report.csv");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "check,radius,observation,h,statistic,threshold,pass\n";
  bool all_pass = true;

  // one-sample KS of u_hat = b u against Ga(y, 1), Bonferroni over all
  // (point, observation) combinations
  std::size_t n_positive = 0;
  for (std::size_t i = 0; i < data.n(); ++i)
    if (data.counts[i] >= 1) ++n_positive;
  std::size_t n_ks = points.size() * n_positive;
  double ks_crit = ks_critical_value(0.01 / static_cast<double>(n_ks), n_draws);

  std::vector<std::vector<Vector>> uhat_store(points.size());
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    uhat_store[pi].resize(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
      if (data.counts[i] < 1) continue;
      Vector uhat = sample_uhat(data, points[pi].beta, i, n_draws, rng);
      std::int64_t y = data.counts[i];
      double ks = ks_statistic(uhat, [y](double x) { return gamma_count_cdf(y, x); });
      bool pass = ks <= ks_crit;
      all_pass = all_pass && pass;
      out << "uhat_ks," << points[pi].radius << ',' << i << ",," << ks << ',' << ks_crit << ','
          << (pass ? 1 : 0) << '\n';
      uhat_store[pi][i] = std::move(uhat);
    }
  }

  // two-sample invariance of the u_hat law across probe points
  std::size_t n_pairs = points.size() * (points.size() - 1) / 2 * n_positive;
  if (n_pairs > 0) {
    double crit2 = two_sample_ks_critical_value(0.01 / static_cast<double>(n_pairs), n_draws,
                                                n_draws);
    for (std::size_t a = 0; a < points.size(); ++a)
      for (std::size_t b = a + 1; b < points.size(); ++b)
        for (std::size_t i = 0; i < data.n(); ++i) {
          if (data.counts[i] < 1) continue;
          double ks = two_sample_ks(uhat_store[a][i], uhat_store[b][i]);
          bool pass = ks <= crit2;
          all_pass = all_pass && pass;
          out << "uhat_invariance," << points[a].radius << "_vs_" << points[b].radius << ',' << i
              << ",," << ks << ',' << crit2 << ',' << (pass ? 1 : 0) << '\n';
        }
  }

  // latent bound E[h(t_hat)] <= 2 E[h(z)]
  const std::pair<BoundTestFunction, const char*> hs[] = {
      {BoundTestFunction::Square, "square"},
      {BoundTestFunction::Abs, "abs"},
      {BoundTestFunction::Fourth, "fourth"}};
  for (const auto& point : points)
    for (std::size_t i = 0; i < data.n(); ++i) {
      if (data.counts[i] < 1) continue;
      for (const auto& [h, hname] : hs) {
        LatentBoundResult res = latent_bound_test(data, point.beta, i, h, n_draws, rng);
        bool pass = res.holds();
        all_pass = all_pass && pass;
        out << "latent_bound," << point.radius << ',' << i << ',' << hname << ',' << res.lhs
            << ',' << res.rhs << ',' << (pass ? 1 : 0) << '\n';
      }
    }

  std::cout << "lemma-check: " << (all_pass ? "PASS" : "FAIL") << " (report " << path << ")\n";
  return all_pass ? 0 : 1;
}

int run_simulate(const RunConfig& cfg, const std::string& design, const std::string& link,
                 const std::string& beta_flag, std::size_t n) {
  Vector beta = parse_beta_flag(beta_flag);
  RngStream rng(cfg.sampler.seed, 0);
  Matrix x;
  std::vector<std::string> names;
  if (design == "sparrow") {
    if (beta.size() != 3) throw parse_error("simulate: sparrow design needs 3 coefficients");
    const std::size_t group_sizes[6] = {10, 9, 9, 16, 7, 1};
    std::size_t total = 0;
    for (std::size_t g : group_sizes) total += g;
    x = Matrix(total, 3);
    std::size_t r = 0;
    for (std::size_t age = 1; age <= 6; ++age)
      for (std::size_t k = 0; k < group_sizes[age - 1]; ++k, ++r) {
        x(r, 0) = 1.0;
        x(r, 1) = static_cast<double>(age);
        x(r, 2) = static_cast<double>(age * age);
      }
    names = {"const", "age", "age2"};
  } else if (design == "normal") {
    if (n == 0) throw parse_error("simulate: --n is required for the normal design");
    x = Matrix(n, beta.size());
    for (std::size_t i = 0; i < n; ++i) {
      x(i, 0) = 1.0;
      for (std::size_t j = 1; j < beta.size(); ++j) x(i, j) = rng.normal();
    }
    names.push_back("const");
    for (std::size_t j = 1; j < beta.size(); ++j) names.push_back("x" + std::to_string(j));
  } else {
    throw parse_error("simulate: unknown design '" + design + "' (sparrow | normal)");
  }

  const std::size_t n_rows = x.rows();
  std::vector<std::int64_t> counts(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) eta += x(i, j) * beta[j];
    double mean = link == "exp" ? std::exp(std::min(eta, 700.0)) : link_lambda(eta);
    counts[i] = sample_poisson(rng, mean);
  }
  PoissonData data(std::move(x), std::move(counts), Vector(n_rows, 1.0));
  std::string path = joined(cfg.out_dir, "synthetic.csv");
  write_poisson_csv(data, names, path);
  std::cout << "simulate: " << data.n() << " rows (" << design << ", " << link << " link) -> "
            << path << '\n';
  return 0;
}

}  // namespace

int cli_dispatch(std::vector<std::string> args) {
  CLI::App app{"Bayesian Poisson and multinomial regression with the identity-like link"};
  app.require_subcommand(1);

  CommonOpts fit_opts, predict_opts, compare_opts, validate_opts, drift_opts, lemma_opts,
      sim_opts;

  CLI::App* fit = app.add_subcommand("fit", "run the configured sampler and write draws + summary");
  add_common(fit, fit_opts);

  CLI::App* predict = app.add_subcommand("predict", "posterior predictive means at new rows");
  add_common(predict, predict_opts);
  std::string predict_draws;
  predict->add_option("--draws", predict_draws, "draws.csv from a fit run")->required();

  CLI::App* compare =
      app.add_subcommand("compare", "fit lambda-link and exp-link on the same data");
  add_common(compare, compare_opts);

  CLI::App* validate = app.add_subcommand("validate", "getting-it-right sampler check");
  add_common(validate, validate_opts);
  std::size_t outer = 200000;
  bool corrupt = false;
  validate->add_option("--outer", outer, "outer iterations");
  validate->add_flag("--corrupt", corrupt, "deliberately corrupt the Poisson kernel");

  CLI::App* drift = app.add_subcommand("drift-check", "empirical drift probe of the energy function");
  add_common(drift, drift_opts);
  std::string drift_norms = "1,10,100,1000";
  std::size_t drift_directions = 4, drift_mc = 10000;
  drift->add_option("--norms", drift_norms, "comma list of probe norms");
  drift->add_option("--directions", drift_directions, "random directions per norm");
  drift->add_option("--mc", drift_mc, "one-sweep replicates per probe point");

  CLI::App* lemma = app.add_subcommand("lemma-check", "latent-law and latent-bound probes");
  add_common(lemma, lemma_opts);
  std::size_t lemma_draws = 100000;
  std::string lemma_norms = "0,3,30";
  lemma->add_option("--draws-per-test", lemma_draws, "Monte Carlo draws per test");
  lemma->add_option("--norms", lemma_norms, "comma list of probe norms");

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic count dataset");
  add_common(sim, sim_opts);
  std::string sim_design = "sparrow", sim_link = "exp", sim_beta = "0.2,0.6,-0.15";
  std::size_t sim_n = 0;
  sim->add_option("--design", sim_design, "sparrow | normal");
  sim->add_option("--link", sim_link, "exp | lambda")->check(CLI::IsMember({"exp", "lambda"}));
  sim->add_option("--beta", sim_beta, "true coefficients, comma list");
  sim->add_option("--n", sim_n, "rows (normal design)");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fit->parsed()) return run_fit(build_config(fit_opts));
    if (predict->parsed()) return run_predict(build_config(predict_opts), predict_draws);
    if (compare->parsed()) return run_compare(build_config(compare_opts));
    if (validate->parsed()) return run_validate(build_config(validate_opts), outer, corrupt);
    if (drift->parsed())
      return run_drift_check(build_config(drift_opts), drift_norms, drift_directions, drift_mc);
    if (lemma->parsed()) return run_lemma_check(build_config(lemma_opts), lemma_draws, lemma_norms);
    if (sim->parsed()) return run_simulate(build_config(sim_opts), sim_design, sim_link, sim_beta, sim_n);
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace identlink
