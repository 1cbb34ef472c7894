#ifndef IDENTLINK_CSV_HPP
#define IDENTLINK_CSV_HPP

#include <string>
#include <vector>

#include "identlink/diagnostics.hpp"
#include "identlink/draws.hpp"
#include "identlink/multinomial_model.hpp"
#include "identlink/poisson_model.hpp"

namespace identlink {

// Poisson data file: header row required; column "y" holds the counts,
// optional column "exposure" holds n_i (default 1), every other column
// becomes a design column in header order.  Parse errors carry 1-based
// row/column coordinates.
PoissonData read_poisson_csv(const std::string& path);

// Covariate-only variant used for prediction: "y" is optional and
// ignored; returns the design rows and exposures plus the design
// column names.
struct CovariateTable {
  Matrix design;
  Vector exposures;
  std::vector<std::string> column_names;
};
CovariateTable read_covariates_csv(const std::string& path);

// Multinomial long format: columns obs_id, category (0 = baseline),
// count, optional trials, remaining columns are covariates (ignored
// for category 0).  Counts of one obs_id must sum to its trials.
MultinomialData read_multinomial_csv(const std::string& path);

void write_draws(const DrawMatrix& draws, const std::string& path);
DrawMatrix read_draws(const std::string& path);

void write_summary_csv(const ChainSummary& summary, const std::string& path);
void write_summary_text(const ChainSummary& summary, const std::string& path);

void write_gir_report_csv(const GirReport& report, const std::string& path);
void write_gir_report_text(const GirReport& report, const std::string& path);

void write_drift_report_csv(const DriftReport& report, const std::string& path);
void write_drift_report_text(const DriftReport& report, const std::string& path);

void write_poisson_csv(const PoissonData& data, const std::vector<std::string>& design_names,
                       const std::string& path);

}  // namespace identlink

#endif  // IDENTLINK_CSV_HPP
