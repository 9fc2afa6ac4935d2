#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "wasserline/dpm.hpp"
#include "wasserline/measures.hpp"
#include "wasserline/reference_distributions.hpp"

namespace wasserline {

// dpm:              fit the mixture to the sample and compare its predictive
//                   draws with Q_M.
// empirical:        compare the empirical measure of the sample itself.
// prior_predictive: compare draws from the prior predictive (no data used
//                   beyond n, which only enters the seed).
enum class StudyMode { dpm, empirical, prior_predictive };

std::string to_string(StudyMode mode);
StudyMode parse_study_mode(const std::string& text);

struct StudyConfig {
  std::vector<std::string> distributions = ReferenceDistribution::names();
  std::vector<double> p_values = {1.0, 2.0};
  std::vector<std::size_t> n_grid = {50, 100, 200, 400, 800, 1600, 3200, 6400};
  int repetitions = 100;
  int grid_size = 200000;  // M of Q_M
  StudyMode mode = StudyMode::dpm;
  DpmConfig dpm;
  ChainConfig chain;  // chain.seed is ignored; cells derive their own
  std::uint64_t seed = 0;
  std::filesystem::path out = "results";
  int workers = 1;

  void validate() const;
};

// Parses the JSON schema documented in the README; missing keys keep the
// defaults above.
StudyConfig study_config_from_json(const nlohmann::json& document);
StudyConfig load_study_config(const std::filesystem::path& path);

struct StudyResult {
  std::string distribution;
  double p = 1.0;
  std::size_t n = 0;
  int repetition = 0;
  std::uint64_t seed = 0;
  double distance = 0.0;  // W_p(., Q_M)
  double power = 0.0;     // W_p^p(., Q_M)
  double runtime_ms = 0.0;
};

struct SummaryRow {
  std::string distribution;
  double p = 1.0;
  std::size_t n = 0;
  double median_distance = 0.0;
};

struct FailedCell {
  std::string distribution;
  double p = 1.0;
  std::size_t n = 0;
  int repetition = 0;
  std::string message;
};

struct StudyOutcome {
  std::vector<StudyResult> results;  // canonical order: dist, p, n, rep
  std::vector<SummaryRow> summary;
  std::vector<FailedCell> failures;
};

// Canonical index of a distribution name in ReferenceDistribution::names().
int distribution_id(const std::string& name);

// seed = mix_seed({master, dist_id, bits(p), n, rep}).
std::uint64_t cell_seed(std::uint64_t master, const std::string& distribution, double p,
                        std::size_t n, int repetition);

// Data for a cell are drawn with the cell seed; the chain or prior
// predictive uses splitmix64(cell seed).
StudyResult run_cell(const StudyConfig& config, const std::string& distribution, double p,
                     std::size_t n, int repetition, const DiscreteMeasure& reference);
StudyResult run_cell(const StudyConfig& config, const std::string& distribution, double p,
                     std::size_t n, int repetition);

// Executes every cell on config.workers threads. Does not write files.
StudyOutcome run_study(const StudyConfig& config);

double median(std::vector<double> values);
std::vector<SummaryRow> summarize(const std::vector<StudyResult>& results);

// Headers: dist,p,n,rep,seed,w_distance,w_power,runtime_ms and
// dist,p,n,median_w_distance.
void write_results_csv(std::ostream& out, const std::vector<StudyResult>& results);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);

struct ErrorBoundRow {
  std::string distribution;
  double p = 1.0;
  int m = 0;
  double bound = 0.0;
};

// approx_error_bound for every distribution and p of the config over
// M = 2^4, ..., 2^12.
std::vector<ErrorBoundRow> error_bound_table(const StudyConfig& config);

// Header: dist,p,M,error_bound. Infinite bounds are written as inf.
void write_error_bound_csv(std::ostream& out, const std::vector<ErrorBoundRow>& rows);

// Writes results.csv, summary.csv and error_bounds.csv under config.out
// (created if needed), plus failures.txt when some cells failed.
void write_study_outputs(const StudyConfig& config, const StudyOutcome& outcome);

}  // namespace wasserline
