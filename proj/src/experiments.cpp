#include "wasserline/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "wasserline/error.hpp"
#include "wasserline/io.hpp"
#include "wasserline/seeding.hpp"
#include "wasserline/wasserstein.hpp"

namespace wasserline {

namespace {

struct CellKey {
  std::string distribution;
  double p;
  std::size_t n;
  int repetition;
};

std::string describe(const CellKey& key) {
  return "cell dist=" + key.distribution + " p=" + format_number(key.p) +
         " n=" + std::to_string(key.n) + " rep=" + std::to_string(key.repetition);
}

template <class T>
T get_or(const nlohmann::json& object, const char* key, T fallback) {
  const auto it = object.find(key);
  if (it == object.end() || it->is_null()) return fallback;
  return it->get<T>();
}

}  // namespace

std::string to_string(StudyMode mode) {
  switch (mode) {
    case StudyMode::dpm: return "dpm";
    case StudyMode::empirical: return "empirical-baseline";
    case StudyMode::prior_predictive: return "prior-predictive";
  }
  return "unknown";
}

StudyMode parse_study_mode(const std::string& text) {
  if (text == "dpm") return StudyMode::dpm;
  if (text == "empirical-baseline" || text == "empirical") return StudyMode::empirical;
  if (text == "prior-predictive") return StudyMode::prior_predictive;
  throw DataError("unknown study mode: " + text);
}

void StudyConfig::validate() const {
  if (distributions.empty() || p_values.empty() || n_grid.empty()) {
    throw DataError("study grids must be non-empty");
  }
  for (const auto& name : distributions) distribution_id(name);
  for (double p : p_values) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw DataError("p values must be finite and >= 1");
  }
  for (std::size_t n : n_grid) {
    if (n == 0) throw DataError("sample sizes must be >= 1");
  }
  if (repetitions < 1) throw DataError("repetitions must be >= 1");
  if (grid_size < 4 || grid_size % 2 != 0) throw DataError("M must be an even integer >= 4");
  if (workers < 1) throw DataError("workers must be >= 1");
  dpm.validate();
  chain.validate();
}

StudyConfig study_config_from_json(const nlohmann::json& document) {
  try {
    StudyConfig config;
    config.distributions = get_or(document, "distributions", config.distributions);
    config.p_values = get_or(document, "p_values", config.p_values);
    config.n_grid = get_or(document, "n_grid", config.n_grid);
    config.repetitions = get_or(document, "repetitions", config.repetitions);
    config.grid_size = get_or(document, "M", config.grid_size);
    if (document.contains("mode")) config.mode = parse_study_mode(document.at("mode").get<std::string>());
    config.seed = get_or<std::uint64_t>(document, "seed", config.seed);
    config.out = get_or<std::string>(document, "out", config.out.string());
    config.workers = get_or(document, "workers", config.workers);

    if (document.contains("dpm")) {
      const auto& d = document.at("dpm");
      if (d.contains("mixture")) config.dpm.mixture = parse_mixture_kind(d.at("mixture").get<std::string>());
      config.dpm.mu_h = get_or(d, "mu_H", config.dpm.mu_h);
      config.dpm.sigma_h = get_or(d, "sigma_H", config.dpm.sigma_h);
      config.dpm.beta = get_or(d, "beta", config.dpm.beta);
      config.dpm.lambda = get_or(d, "lambda", config.dpm.lambda);
      config.dpm.beta_alpha = get_or(d, "beta_alpha", config.dpm.beta_alpha);
      config.dpm.lambda_alpha = get_or(d, "lambda_alpha", config.dpm.lambda_alpha);
      if (d.contains("fixed_sigma") && !d.at("fixed_sigma").is_null()) {
        config.dpm.fixed_sigma = d.at("fixed_sigma").get<double>();
      }
    }
    if (document.contains("chain")) {
      const auto& c = document.at("chain");
      config.chain.burn_in = get_or(c, "burn_in", config.chain.burn_in);
      config.chain.n_draws = get_or(c, "n_draws", config.chain.n_draws);
      config.chain.thinning = get_or(c, "thinning", config.chain.thinning);
    }
    config.validate();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid study config: ") + e.what());
  }
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return study_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("invalid JSON in study config: ") + e.what());
  }
}

int distribution_id(const std::string& name) {
  const auto& names = ReferenceDistribution::names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw DataError("unknown distribution: " + name);
  return static_cast<int>(it - names.begin());
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& distribution, double p,
                        std::size_t n, int repetition) {
  return mix_seed({master, static_cast<std::uint64_t>(distribution_id(distribution)),
                   double_bits(p), static_cast<std::uint64_t>(n),
                   static_cast<std::uint64_t>(repetition)});
}

StudyResult run_cell(const StudyConfig& config, const std::string& distribution, double p,
                     std::size_t n, int repetition, const DiscreteMeasure& reference) {
  const CellKey key{distribution, p, n, repetition};
  try {
    const auto start = std::chrono::steady_clock::now();
    const ReferenceDistribution dist = ReferenceDistribution::from_name(distribution);
    StudyResult result;
    result.distribution = distribution;
    result.p = p;
    result.n = n;
    result.repetition = repetition;
    result.seed = cell_seed(config.seed, distribution, p, n, repetition);

    const std::uint64_t stream_seed = splitmix64(result.seed);
    std::optional<DiscreteMeasure> estimate;
    switch (config.mode) {
      case StudyMode::empirical:
        estimate = empirical_from_sample(sample(dist, n, result.seed));
        break;
      case StudyMode::dpm: {
        ChainConfig chain = config.chain;
        chain.seed = stream_seed;
        const ChainResult fit = run_chain(sample(dist, n, result.seed), config.dpm, chain);
        estimate = DiscreteMeasure::uniform_on(fit.draws);
        break;
      }
      case StudyMode::prior_predictive: {
        const auto draws = prior_predictive_sample(
            config.dpm, static_cast<std::size_t>(config.chain.n_draws), stream_seed);
        estimate = DiscreteMeasure::uniform_on(draws);
        break;
      }
    }
    result.power = wp_quantile(*estimate, reference, p);
    result.distance = power_to_distance(result.power, p);
    result.runtime_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return result;
  } catch (const std::exception& e) {
    throw std::runtime_error(describe(key) + ": " + e.what());
  }
}

StudyResult run_cell(const StudyConfig& config, const std::string& distribution, double p,
                     std::size_t n, int repetition) {
  const DiscreteMeasure reference =
      discretize(ReferenceDistribution::from_name(distribution), config.grid_size);
  return run_cell(config, distribution, p, n, repetition, reference);
}

StudyOutcome run_study(const StudyConfig& config) {
  config.validate();

  std::vector<std::string> distributions = config.distributions;
  std::sort(distributions.begin(), distributions.end(),
            [](const std::string& a, const std::string& b) {
              return distribution_id(a) < distribution_id(b);
            });
  distributions.erase(std::unique(distributions.begin(), distributions.end()), distributions.end());
  std::vector<double> p_values = config.p_values;
  std::sort(p_values.begin(), p_values.end());
  p_values.erase(std::unique(p_values.begin(), p_values.end()), p_values.end());
  std::vector<std::size_t> n_grid = config.n_grid;
  std::sort(n_grid.begin(), n_grid.end());
  n_grid.erase(std::unique(n_grid.begin(), n_grid.end()), n_grid.end());

  std::map<std::string, DiscreteMeasure> references;
  for (const auto& name : distributions) {
    references.emplace(name, discretize(ReferenceDistribution::from_name(name), config.grid_size));
  }

  std::vector<CellKey> cells;
  for (const auto& name : distributions) {
    for (double p : p_values) {
      for (std::size_t n : n_grid) {
        for (int rep = 0; rep < config.repetitions; ++rep) cells.push_back({name, p, n, rep});
      }
    }
  }

  std::vector<std::optional<StudyResult>> slots(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const CellKey& key = cells[i];
      try {
        slots[i] = run_cell(config, key.distribution, key.p, key.n, key.repetition,
                            references.at(key.distribution));
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(config.workers), cells.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }

  StudyOutcome outcome;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (slots[i]) {
      outcome.results.push_back(*slots[i]);
    } else {
      const CellKey& key = cells[i];
      outcome.failures.push_back({key.distribution, key.p, key.n, key.repetition, errors[i]});
    }
  }
  outcome.summary = summarize(outcome.results);
  return outcome;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::vector<SummaryRow> summarize(const std::vector<StudyResult>& results) {
  std::vector<SummaryRow> summary;
  std::size_t i = 0;
  while (i < results.size()) {
    std::size_t j = i;
    std::vector<double> distances;
    while (j < results.size() && results[j].distribution == results[i].distribution &&
           results[j].p == results[i].p && results[j].n == results[i].n) {
      distances.push_back(results[j].distance);
      ++j;
    }
    summary.push_back({results[i].distribution, results[i].p, results[i].n, median(distances)});
    i = j;
  }
  return summary;
}

void write_results_csv(std::ostream& out, const std::vector<StudyResult>& results) {
  out << "dist,p,n,rep,seed,w_distance,w_power,runtime_ms\n";
  for (const auto& r : results) {
    char runtime[32];
    std::snprintf(runtime, sizeof runtime, "%.3f", r.runtime_ms);
    out << r.distribution << ',' << format_number(r.p) << ',' << r.n << ',' << r.repetition << ','
        << r.seed << ',' << format_number(r.distance) << ',' << format_number(r.power) << ','
        << runtime << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "dist,p,n,median_w_distance\n";
  for (const auto& row : summary) {
    out << row.distribution << ',' << format_number(row.p) << ',' << row.n << ','
        << format_number(row.median_distance) << '\n';
  }
}

std::vector<ErrorBoundRow> error_bound_table(const StudyConfig& config) {
  std::vector<ErrorBoundRow> rows;
  for (const auto& name : config.distributions) {
    const auto dist = ReferenceDistribution::from_name(name);
    for (double p : config.p_values) {
      for (int e = 4; e <= 12; ++e) rows.push_back({name, p, 1 << e, approx_error_bound(dist, 1 << e, p)});
    }
  }
  return rows;
}

void write_error_bound_csv(std::ostream& out, const std::vector<ErrorBoundRow>& rows) {
  out << "dist,p,M,error_bound\n";
  for (const auto& row : rows) {
    out << row.distribution << ',' << format_number(row.p) << ',' << row.m << ','
        << format_number(row.bound) << '\n';
  }
}

void write_study_outputs(const StudyConfig& config, const StudyOutcome& outcome) {
  std::filesystem::create_directories(config.out);
  auto open = [](const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
  };
  {
    auto out = open(config.out / "results.csv");
    write_results_csv(out, outcome.results);
  }
  {
    auto out = open(config.out / "summary.csv");
    write_summary_csv(out, outcome.summary);
  }
  {
    auto out = open(config.out / "error_bounds.csv");
    write_error_bound_csv(out, error_bound_table(config));
  }
  const auto failures_path = config.out / "failures.txt";
  if (!outcome.failures.empty()) {
    auto out = open(failures_path);
    for (const auto& f : outcome.failures) out << f.message << '\n';
  } else {
    std::filesystem::remove(failures_path);
  }
}

}  // namespace wasserline
