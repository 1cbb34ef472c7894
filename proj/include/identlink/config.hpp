#ifndef IDENTLINK_CONFIG_HPP
#define IDENTLINK_CONFIG_HPP

#include <string>

#include "identlink/baseline_explink.hpp"
#include "identlink/draws.hpp"
#include "identlink/poisson_model.hpp"

namespace identlink {

// Run configuration assembled from a `key = value` config file (with
// '#' comments) and command-line overrides.  Prior entries stay as raw
// strings until the data dimension is known: scalars broadcast to a
// diagonal (precision) or constant vector (mean), a comma list is used
// verbatim, and anything else is read as a path to a CSV matrix.
struct RunConfig {
  std::string model = "poisson-lambda";  // poisson-lambda | poisson-exp | multinomial-lambda
  std::string data_path;
  std::string out_dir = ".";
  std::string prior_mean = "0";
  std::string prior_precision = "1";
  std::string group_column;  // panel grouping for `compare`
  SamplerConfig sampler;
  double mh_initial_step = 0.1;
  double mh_target_accept = 0.30;
  std::size_t mh_adapt_window = 50;
};

// Parse a config file into `cfg`; unknown keys are an error.
void load_config_file(const std::string& path, RunConfig& cfg);

// Apply one key = value assignment (shared by file parsing and flags).
void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value,
                      std::size_t line_no = 0);

GaussianPrior resolve_prior(const RunConfig& cfg, std::size_t p);

MhConfig make_mh_config(const RunConfig& cfg);

}  // namespace identlink

#endif  // IDENTLINK_CONFIG_HPP
