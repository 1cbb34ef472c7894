#include "identlink/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "identlink/errors.hpp"

namespace identlink {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // data rows, header excluded
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open file: " + path);
  Table t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = cells;
    } else {
      if (cells.size() != t.header.size())
        throw parse_error("wrong number of cells in " + path, line_no, cells.size());
      t.rows.push_back(std::move(cells));
    }
  }
  if (t.header.empty()) throw parse_error("empty file: " + path);
  return t;
}

double parse_double(const std::string& cell, std::size_t row, std::size_t col) {
  if (cell.empty()) throw parse_error("empty cell", row, col);
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(v))
    throw parse_error("non-numeric cell '" + cell + "'", row, col);
  return v;
}

std::int64_t parse_count(const std::string& cell, std::size_t row, std::size_t col) {
  double v = parse_double(cell, row, col);
  if (v < 0.0) throw parse_error("negative count '" + cell + "'", row, col);
  if (v != std::floor(v) || v > 9e15)
    throw parse_error("count is not a non-negative integer: '" + cell + "'", row, col);
  return static_cast<std::int64_t>(v);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

}  // namespace

PoissonData read_poisson_csv(const std::string& path) {
  Table t = read_table(path);
  std::ptrdiff_t y_col = -1, exp_col = -1;
  std::vector<std::size_t> design_cols;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (t.header[j] == "y")
      y_col = static_cast<std::ptrdiff_t>(j);
    else if (t.header[j] == "exposure")
      exp_col = static_cast<std::ptrdiff_t>(j);
    else
      design_cols.push_back(j);
  }
  if (y_col < 0) throw parse_error("missing required column 'y' in " + path, 1);
  if (design_cols.empty()) throw parse_error("no design columns in " + path, 1);

  const std::size_t n = t.rows.size();
  if (n == 0) throw parse_error("no data rows in " + path, 1);
  Matrix design(n, design_cols.size());
  std::vector<std::int64_t> counts(n);
  Vector exposures(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t file_row = i + 2;  // 1-based, after header
    counts[i] = parse_count(t.rows[i][y_col], file_row, static_cast<std::size_t>(y_col) + 1);
    if (exp_col >= 0) {
      exposures[i] = parse_double(t.rows[i][exp_col], file_row, static_cast<std::size_t>(exp_col) + 1);
      if (!(exposures[i] > 0.0))
        throw parse_error("non-positive exposure", file_row, static_cast<std::size_t>(exp_col) + 1);
    }
    for (std::size_t jj = 0; jj < design_cols.size(); ++jj)
      design(i, jj) = parse_double(t.rows[i][design_cols[jj]], file_row, design_cols[jj] + 1);
  }
  return PoissonData(std::move(design), std::move(counts), std::move(exposures));
}

CovariateTable read_covariates_csv(const std::string& path) {
  Table t = read_table(path);
  std::ptrdiff_t exp_col = -1;
  std::vector<std::size_t> design_cols;
  CovariateTable out;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (t.header[j] == "y") continue;
    if (t.header[j] == "exposure") {
      exp_col = static_cast<std::ptrdiff_t>(j);
      continue;
    }
    design_cols.push_back(j);
    out.column_names.push_back(t.header[j]);
  }
  if (design_cols.empty()) throw parse_error("no design columns in " + path, 1);
  const std::size_t n = t.rows.size();
  if (n == 0) throw parse_error("no data rows in " + path, 1);
  out.design = Matrix(n, design_cols.size());
  out.exposures.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t file_row = i + 2;
    if (exp_col >= 0) {
      out.exposures[i] =
          parse_double(t.rows[i][exp_col], file_row, static_cast<std::size_t>(exp_col) + 1);
      if (!(out.exposures[i] > 0.0))
        throw parse_error("non-positive exposure", file_row, static_cast<std::size_t>(exp_col) + 1);
    }
    for (std::size_t jj = 0; jj < design_cols.size(); ++jj)
      out.design(i, jj) = parse_double(t.rows[i][design_cols[jj]], file_row, design_cols[jj] + 1);
  }
  return out;
}

MultinomialData read_multinomial_csv(const std::string& path) {
  Table t = read_table(path);
  std::ptrdiff_t id_col = -1, cat_col = -1, count_col = -1, trials_col = -1;
  std::vector<std::size_t> cov_cols;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (t.header[j] == "obs_id")
      id_col = static_cast<std::ptrdiff_t>(j);
    else if (t.header[j] == "category")
      cat_col = static_cast<std::ptrdiff_t>(j);
    else if (t.header[j] == "count")
      count_col = static_cast<std::ptrdiff_t>(j);
    else if (t.header[j] == "trials")
      trials_col = static_cast<std::ptrdiff_t>(j);
    else
      cov_cols.push_back(j);
  }
  if (id_col < 0 || cat_col < 0 || count_col < 0)
    throw parse_error("multinomial file needs obs_id, category, count columns: " + path, 1);
  if (cov_cols.empty()) throw parse_error("no covariate columns in " + path, 1);

  struct RawObs {
    std::map<std::int64_t, std::pair<std::int64_t, Vector>> by_category;
    std::int64_t declared_trials = -1;
    std::size_t first_row = 0;
  };
  std::map<std::string, RawObs> grouped;
  std::vector<std::string> order;

  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    std::size_t file_row = i + 2;
    const auto& cells = t.rows[i];
    std::string id = cells[id_col];
    std::int64_t cat = parse_count(cells[cat_col], file_row, static_cast<std::size_t>(cat_col) + 1);
    std::int64_t cnt = parse_count(cells[count_col], file_row, static_cast<std::size_t>(count_col) + 1);
    auto it = grouped.find(id);
    if (it == grouped.end()) {
      it = grouped.emplace(id, RawObs{}).first;
      it->second.first_row = file_row;
      order.push_back(id);
    }
    RawObs& obs = it->second;
    if (trials_col >= 0) {
      std::int64_t trials =
          parse_count(cells[trials_col], file_row, static_cast<std::size_t>(trials_col) + 1);
      if (obs.declared_trials >= 0 && obs.declared_trials != trials)
        throw parse_error("inconsistent trials for obs_id '" + id + "'", file_row,
                          static_cast<std::size_t>(trials_col) + 1);
      obs.declared_trials = trials;
    }
    Vector cov(cov_cols.size());
    for (std::size_t jj = 0; jj < cov_cols.size(); ++jj)
      cov[jj] = parse_double(cells[cov_cols[jj]], file_row, cov_cols[jj] + 1);
    if (!obs.by_category.emplace(cat, std::make_pair(cnt, std::move(cov))).second)
      throw parse_error("duplicate category for obs_id '" + id + "'", file_row,
                        static_cast<std::size_t>(cat_col) + 1);
  }

  std::vector<MultinomialObservation> observations;
  for (const std::string& id : order) {
    RawObs& raw = grouped[id];
    if (!raw.by_category.count(0))
      throw parse_error("obs_id '" + id + "' has no baseline (category 0) row", raw.first_row);
    std::int64_t max_cat = raw.by_category.rbegin()->first;
    if (max_cat < 1)
      throw parse_error("obs_id '" + id + "' has no non-baseline category", raw.first_row);
    MultinomialObservation o;
    o.counts.resize(static_cast<std::size_t>(max_cat) + 1);
    o.covariates = Matrix(static_cast<std::size_t>(max_cat), cov_cols.size());
    std::int64_t total = 0;
    for (std::int64_t k = 0; k <= max_cat; ++k) {
      auto it = raw.by_category.find(k);
      if (it == raw.by_category.end())
        throw parse_error("obs_id '" + id + "' is missing category " + std::to_string(k),
                          raw.first_row);
      o.counts[k] = it->second.first;
      total += it->second.first;
      if (k >= 1)
        for (std::size_t jj = 0; jj < cov_cols.size(); ++jj)
          o.covariates(k - 1, jj) = it->second.second[jj];
    }
    if (raw.declared_trials >= 0 && raw.declared_trials != total)
      throw parse_error("counts for obs_id '" + id + "' sum to " + std::to_string(total) +
                            " but trials is " + std::to_string(raw.declared_trials),
                        raw.first_row);
    o.trials = total;
    observations.push_back(std::move(o));
  }
  return MultinomialData(std::move(observations), cov_cols.size());
}

void write_draws(const DrawMatrix& draws, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "chain,sweep";
  for (const auto& n : draws.param_names) out << ',' << n;
  for (std::size_t i = 0; i < draws.n_latent; ++i) out << ",u_" << i;
  for (std::size_t i = 0; i < draws.n_latent; ++i) out << ",v_" << i;
  out << '\n';
  for (std::size_t r = 0; r < draws.rows(); ++r) {
    out << draws.chain[r] << ',' << draws.sweep[r];
    for (std::size_t j = 0; j < draws.n_params; ++j) out << ',' << format_double(draws.at(r, j));
    for (std::size_t i = 0; i < draws.n_latent; ++i)
      out << ',' << format_double(draws.latent_u[r * draws.n_latent + i]);
    for (std::size_t i = 0; i < draws.n_latent; ++i)
      out << ',' << format_double(draws.latent_v[r * draws.n_latent + i]);
    out << '\n';
  }
}

DrawMatrix read_draws(const std::string& path) {
  Table t = read_table(path);
  if (t.header.size() < 3 || t.header[0] != "chain" || t.header[1] != "sweep")
    throw parse_error("draws file must start with chain,sweep columns: " + path, 1);
  DrawMatrix draws;
  std::size_t n_u = 0, n_v = 0;
  for (std::size_t j = 2; j < t.header.size(); ++j) {
    if (t.header[j].rfind("u_", 0) == 0)
      ++n_u;
    else if (t.header[j].rfind("v_", 0) == 0)
      ++n_v;
    else
      draws.param_names.push_back(t.header[j]);
  }
  if (n_u != n_v) throw parse_error("unbalanced latent columns in " + path, 1);
  draws.n_params = draws.param_names.size();
  draws.n_latent = n_u;
  std::uint32_t max_chain = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    std::size_t file_row = i + 2;
    const auto& cells = t.rows[i];
    std::uint32_t chain = static_cast<std::uint32_t>(parse_count(cells[0], file_row, 1));
    draws.chain.push_back(chain);
    max_chain = std::max(max_chain, chain);
    draws.sweep.push_back(static_cast<std::uint64_t>(parse_count(cells[1], file_row, 2)));
    std::size_t c = 2;
    for (std::size_t j = 0; j < draws.n_params; ++j, ++c)
      draws.values.push_back(parse_double(cells[c], file_row, c + 1));
    for (std::size_t j = 0; j < draws.n_latent; ++j, ++c)
      draws.latent_u.push_back(parse_double(cells[c], file_row, c + 1));
    for (std::size_t j = 0; j < draws.n_latent; ++j, ++c)
      draws.latent_v.push_back(parse_double(cells[c], file_row, c + 1));
  }
  draws.n_chains = t.rows.empty() ? 0 : max_chain + 1;
  return draws;
}

void write_summary_csv(const ChainSummary& summary, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "param,mean,sd,q2.5,q50,q97.5,ess,mcse,geweke_z,ess_warning\n";
  for (const auto& c : summary.coords) {
    out << c.name << ',' << format_double(c.mean) << ',' << format_double(c.sd) << ','
        << format_double(c.q025) << ',' << format_double(c.q50) << ',' << format_double(c.q975)
        << ',' << format_double(c.ess) << ',' << format_double(c.mcse) << ','
        << format_double(c.geweke) << ',' << (c.ess_warning ? 1 : 0) << '\n';
  }
}

void write_summary_text(const ChainSummary& summary, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "posterior summary (" << summary.n_draws << " draws, " << summary.n_chains
      << " chains)\n\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %10s %10s %10s %10s %10s %9s %9s %8s\n", "param", "mean",
                "sd", "q2.5", "q50", "q97.5", "ess", "mcse", "geweke");
  out << buf;
  for (const auto& c : summary.coords) {
    std::snprintf(buf, sizeof buf, "%-12s %10.4f %10.4f %10.4f %10.4f %10.4f %9.1f %9.5f %8.2f%s\n",
                  c.name.c_str(), c.mean, c.sd, c.q025, c.q50, c.q975, c.ess, c.mcse, c.geweke,
                  c.ess_warning ? " [const]" : "");
    out << buf;
  }
}

void write_gir_report_csv(const GirReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "test_function,mc_mean,mc_se,sc_mean,sc_se,z\n";
  for (const auto& r : report.rows)
    out << r.name << ',' << format_double(r.mc_mean) << ',' << format_double(r.mc_se) << ','
        << format_double(r.sc_mean) << ',' << format_double(r.sc_se) << ','
        << format_double(r.z) << '\n';
}

void write_gir_report_text(const GirReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "getting-it-right comparison, " << report.n_outer << " outer iterations\n";
  out << "marginal-conditional vs successive-conditional simulator\n\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %12s %10s %12s %10s %8s\n", "test_function", "mc_mean",
                "mc_se", "sc_mean", "sc_se", "z");
  out << buf;
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%-16s %12.5f %10.5f %12.5f %10.5f %8.2f%s\n", r.name.c_str(),
                  r.mc_mean, r.mc_se, r.sc_mean, r.sc_se, r.z,
                  std::abs(r.z) > 3.0 ? "  <-- |z| > 3" : "");
    out << buf;
  }
  out << "\nmax |z| = " << format_double(report.max_abs_z()) << '\n';
  out << (report.all_within(3.0) ? "PASS" : "FAIL") << " (threshold |z| <= 3)\n";
}

void write_drift_report_csv(const DriftReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "direction,radius,v,pv,pv_se,ratio,ok,note\n";
  for (const auto& p : report.points)
    out << p.direction << ',' << format_double(p.radius) << ',' << format_double(p.v) << ','
        << format_double(p.pv) << ',' << format_double(p.pv_se) << ','
        << format_double(p.ratio) << ',' << (p.ok ? 1 : 0) << ',' << p.note << '\n';
}

void write_drift_report_text(const DriftReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "empirical drift probe of V(beta) = beta' Psi beta\n\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-9s %10s %14s %14s %12s %10s\n", "direction", "radius", "V",
                "PV", "PV_se", "PV/V");
  out << buf;
  for (const auto& p : report.points) {
    if (!p.ok) {
      std::snprintf(buf, sizeof buf, "%-9zu %10.2f  failed: %s\n", p.direction, p.radius,
                    p.note.c_str());
    } else {
      std::snprintf(buf, sizeof buf, "%-9zu %10.2f %14.4f %14.4f %12.4f %10.4f\n", p.direction,
                    p.radius, p.v, p.pv, p.pv_se, p.ratio);
    }
    out << buf;
  }
}

void write_poisson_csv(const PoissonData& data, const std::vector<std::string>& design_names,
                       const std::string& path) {
  if (design_names.size() != data.p())
    throw std::invalid_argument("write_poisson_csv: name count mismatch");
  std::ofstream out = open_out(path);
  out << "y";
  for (const auto& n : design_names) out << ',' << n;
  out << ",exposure\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    out << data.counts[i];
    for (std::size_t j = 0; j < data.p(); ++j) out << ',' << format_double(data.design(i, j));
    out << ',' << format_double(data.exposures[i]) << '\n';
  }
}

}  // namespace identlink
