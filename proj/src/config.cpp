#include "identlink/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "identlink/csv.hpp"
#include "identlink/errors.hpp"

namespace identlink {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE && std::isfinite(out);
}

Vector parse_comma_list(const std::string& s) {
  Vector out;
  std::string cur;
  auto flush = [&]() {
    double v;
    if (!parse_number(trim(cur), v)) throw parse_error("bad number in list: '" + cur + "'");
    out.push_back(v);
    cur.clear();
  };
  for (char ch : s) {
    if (ch == ',')
      flush();
    else
      cur.push_back(ch);
  }
  flush();
  return out;
}

std::size_t parse_size(const std::string& value, const std::string& key, std::size_t line_no) {
  double v;
  if (!parse_number(value, v) || v < 0 || v != std::floor(v))
    throw parse_error("config key '" + key + "' needs a non-negative integer", line_no);
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& value, const std::string& key, std::size_t line_no) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw parse_error("config key '" + key + "' needs true/false", line_no);
}

}  // namespace

void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value,
                      std::size_t line_no) {
  if (key == "model") {
    if (value != "poisson-lambda" && value != "poisson-exp" && value != "multinomial-lambda")
      throw parse_error("unknown model '" + value + "'", line_no);
    cfg.model = value;
  } else if (key == "data") {
    cfg.data_path = value;
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else if (key == "prior_mean") {
    cfg.prior_mean = value;
  } else if (key == "prior_precision") {
    cfg.prior_precision = value;
  } else if (key == "group_column") {
    cfg.group_column = value;
  } else if (key == "burn_in") {
    cfg.sampler.burn_in = parse_size(value, key, line_no);
  } else if (key == "keep") {
    cfg.sampler.keep = parse_size(value, key, line_no);
  } else if (key == "thin") {
    cfg.sampler.thin = parse_size(value, key, line_no);
  } else if (key == "chains") {
    cfg.sampler.n_chains = parse_size(value, key, line_no);
  } else if (key == "seed") {
    cfg.sampler.seed = static_cast<std::uint64_t>(parse_size(value, key, line_no));
  } else if (key == "store_latents") {
    cfg.sampler.store_latents = parse_bool(value, key, line_no);
  } else if (key == "init") {
    if (value == "prior-draw") {
      cfg.sampler.init = InitSpec{InitSpec::Kind::PriorDraw, {}};
    } else if (value == "zero") {
      cfg.sampler.init = InitSpec{InitSpec::Kind::Zero, {}};
    } else {
      cfg.sampler.init = InitSpec{InitSpec::Kind::Given, parse_comma_list(value)};
    }
  } else if (key == "mh_initial_step") {
    double v;
    if (!parse_number(value, v) || v <= 0) throw parse_error("mh_initial_step must be positive", line_no);
    cfg.mh_initial_step = v;
  } else if (key == "mh_target_accept") {
    double v;
    if (!parse_number(value, v) || v <= 0 || v >= 1)
      throw parse_error("mh_target_accept must be in (0,1)", line_no);
    cfg.mh_target_accept = v;
  } else if (key == "mh_adapt_window") {
    cfg.mh_adapt_window = parse_size(value, key, line_no);
    if (cfg.mh_adapt_window == 0) throw parse_error("mh_adapt_window must be >= 1", line_no);
  } else {
    throw parse_error("unknown config key '" + key + "'", line_no);
  }
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open config file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw parse_error("config line is not 'key = value'", line_no);
    apply_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no);
  }
}

GaussianPrior resolve_prior(const RunConfig& cfg, std::size_t p) {
  GaussianPrior prior;
  double scalar;
  if (parse_number(cfg.prior_mean, scalar)) {
    prior.mean.assign(p, scalar);
  } else if (cfg.prior_mean.find(',') != std::string::npos) {
    prior.mean = parse_comma_list(cfg.prior_mean);
    if (prior.mean.size() != p)
      throw parse_error("prior_mean has " + std::to_string(prior.mean.size()) +
                        " entries but the design has " + std::to_string(p) + " columns");
  } else {
    throw parse_error("prior_mean must be a scalar or comma list: '" + cfg.prior_mean + "'");
  }

  if (parse_number(cfg.prior_precision, scalar)) {
    if (scalar <= 0) throw parse_error("prior_precision scalar must be positive");
    prior.precision = Matrix::diagonal(Vector(p, scalar));
  } else if (cfg.prior_precision.find(',') != std::string::npos) {
    Vector diag = parse_comma_list(cfg.prior_precision);
    if (diag.size() != p)
      throw parse_error("prior_precision diagonal has wrong length");
    prior.precision = Matrix::diagonal(diag);
  } else {
    // a CSV matrix file: p rows with p numeric cells, no header
    std::ifstream in(cfg.prior_precision);
    if (!in) throw parse_error("cannot open precision matrix file: " + cfg.prior_precision);
    prior.precision = Matrix(p, p);
    std::string line;
    std::size_t i = 0;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty()) continue;
      if (i >= p) throw parse_error("precision matrix has too many rows", i + 1);
      Vector row = parse_comma_list(line);
      if (row.size() != p) throw parse_error("precision matrix row has wrong length", i + 1);
      for (std::size_t j = 0; j < p; ++j) prior.precision(i, j) = row[j];
      ++i;
    }
    if (i != p) throw parse_error("precision matrix has too few rows", i);
  }
  prior.validate();
  return prior;
}

MhConfig make_mh_config(const RunConfig& cfg) {
  MhConfig mh;
  mh.initial_step = cfg.mh_initial_step;
  mh.target_accept = cfg.mh_target_accept;
  mh.adapt_window = cfg.mh_adapt_window;
  mh.burn_in = cfg.sampler.burn_in;
  mh.keep = cfg.sampler.keep;
  mh.thin = cfg.sampler.thin;
  mh.n_chains = cfg.sampler.n_chains;
  mh.seed = cfg.sampler.seed;
  // A prior draw under a diffuse prior can start the random walk at an
  // absurd exp-link predictor; the Metropolis baseline starts at zero
  // unless an explicit vector is given.
  mh.init = cfg.sampler.init.kind == InitSpec::Kind::Given ? cfg.sampler.init
                                                           : InitSpec{InitSpec::Kind::Zero, {}};
  return mh;
}

}  // namespace identlink
