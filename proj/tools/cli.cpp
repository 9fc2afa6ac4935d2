#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "wasserline/dpm.hpp"
#include "wasserline/dyadic_bounds.hpp"
#include "wasserline/error.hpp"
#include "wasserline/experiments.hpp"
#include "wasserline/io.hpp"
#include "wasserline/reference_distributions.hpp"
#include "wasserline/wasserstein.hpp"

namespace wasserline::cli {

namespace {

struct DistanceArgs {
  std::string p;
  std::string a;
  std::string b;
  bool power = false;
};

struct BoundArgs {
  std::string mode = "compact";
  double p = 1.0;
  int levels = 8;
  std::optional<int> blocks;
  double delta = 1.0;
  std::optional<double> k;
  std::string inner = "exact";
  std::string a;
  std::string b;
};

struct DiscretizeArgs {
  std::string dist;
  int m = 0;
  bool error_bound = false;
  double p = 1.0;
  std::string out;
};

struct FitArgs {
  std::string data;
  std::string mixture = "location";
  int burn_in = 1000;
  int draws = 10000;
  int thinning = 1;
  std::uint64_t seed = 0;
  std::optional<double> fixed_sigma;
  double mu_h = 0.0;
  double sigma_h = 1.0;
  double beta = 1.0;
  double lambda = 1.0;
  double beta_alpha = 1.0;
  double lambda_alpha = 1.0;
  std::string out = "predictive.csv";
  std::string diagnostics = "diagnostics.json";
};

struct SimulateArgs {
  std::string config;
  std::optional<int> workers;
};

struct DiagnoseArgs {
  std::string sample;
  double p = 1.0;
  double delta = 1.0;
  int m_max = 10;
};

int run_distance(const DistanceArgs& args, std::ostream& out) {
  const DistanceOrder order = DistanceOrder::parse(args.p);
  const DiscreteMeasure a = read_measure_csv(args.a);
  const DiscreteMeasure b = read_measure_csv(args.b);
  double value = 0.0;
  if (order.is_infinite()) {
    value = w_infty(a, b);
  } else if (args.power) {
    value = wp_quantile(a, b, order.value());
  } else {
    value = wasserstein_distance(a, b, order);
  }
  out << format_number(value) << '\n';
  return kOk;
}

// Smallest K for which P(B_m) + Q(B_m) <= K 2^(-exponent m) holds.
double minimal_tail_constant(const DiscreteMeasure& a, const DiscreteMeasure& b, double exponent) {
  const int last = std::max(max_block(a), max_block(b));
  double k = 0.0;
  for (int m = 0; m <= last; ++m) {
    k = std::max(k, std::exp2(exponent * m) * (block_mass(a, m) + block_mass(b, m)));
  }
  return k;
}

int run_bound(const BoundArgs& args, std::ostream& out) {
  const DiscreteMeasure a = read_measure_csv(args.a);
  const DiscreteMeasure b = read_measure_csv(args.b);
  BoundReport report;
  switch (parse_bound_mode(args.mode)) {
    case BoundMode::compact:
      report = bound_compact(a, b, args.levels, args.p);
      break;
    case BoundMode::unbounded: {
      InnerDistance inner = InnerDistance::exact();
      if (args.inner == "recursive") {
        inner = InnerDistance::recursive(args.levels);
      } else if (args.inner != "exact") {
        throw DataError("unknown inner mode: " + args.inner);
      }
      report = bound_unbounded(a, b, args.p, inner);
      break;
    }
    case BoundMode::combined: {
      CombinedParams params;
      params.order = args.p;
      params.levels = args.levels;
      params.blocks = args.blocks.value_or(std::max(max_block(a), max_block(b)));
      params.delta = args.delta;
      params.k = args.k.value_or(minimal_tail_constant(a, b, args.p + args.delta));
      report = bound_combined(a, b, params);
      break;
    }
  }
  out << to_json(report).dump(2) << '\n';
  return kOk;
}

int run_discretize(const DiscretizeArgs& args, std::ostream& out) {
  const ReferenceDistribution dist = ReferenceDistribution::from_name(args.dist);
  const DiscreteMeasure grid = discretize(dist, args.m);
  if (!args.out.empty()) {
    write_measure_csv(args.out, grid);
  } else if (!args.error_bound) {
    write_measure_csv(out, grid);
  }
  if (args.error_bound) out << format_number(approx_error_bound(dist, args.m, args.p)) << '\n';
  return kOk;
}

int run_fit(const FitArgs& args, std::ostream& out) {
  DpmConfig config;
  config.mixture = parse_mixture_kind(args.mixture);
  config.mu_h = args.mu_h;
  config.sigma_h = args.sigma_h;
  config.beta = args.beta;
  config.lambda = args.lambda;
  config.beta_alpha = args.beta_alpha;
  config.lambda_alpha = args.lambda_alpha;
  config.fixed_sigma = args.fixed_sigma;
  ChainConfig chain;
  chain.burn_in = args.burn_in;
  chain.n_draws = args.draws;
  chain.thinning = args.thinning;
  chain.seed = args.seed;

  const SortedSample data = SortedSample::from_unsorted(read_values_csv(args.data));
  const ChainResult result = run_chain(data, config, chain);
  write_values_csv(args.out, result.draws);
  nlohmann::json diagnostics = to_json(result.diagnostics);
  diagnostics["mixture"] = to_string(config.mixture);
  diagnostics["seed"] = args.seed;
  diagnostics["n"] = data.size();
  {
    std::ofstream file(args.diagnostics);
    if (!file) throw DataError("cannot write " + args.diagnostics);
    file << diagnostics.dump(2) << '\n';
  }
  out << "wrote " << result.draws.size() << " predictive draws to " << args.out << '\n';
  return kOk;
}

int run_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  StudyConfig config = load_study_config(args.config);
  if (args.workers) {
    if (*args.workers < 1) throw DataError("workers must be >= 1");
    config.workers = *args.workers;
  }
  const StudyOutcome outcome = run_study(config);
  write_study_outputs(config, outcome);
  out << "wrote " << outcome.results.size() << " results to "
      << (config.out / "results.csv").string() << '\n';
  if (!outcome.failures.empty()) {
    for (const auto& f : outcome.failures) err << f.message << '\n';
    return kDataError;
  }
  return kOk;
}

int run_diagnose(const DiagnoseArgs& args, std::ostream& out) {
  const DiscreteMeasure sample = read_measure_csv(args.sample);
  const TailMassReport tail = tail_mass_diagnostic(sample, args.p, args.m_max);
  nlohmann::json report = to_json(tail);
  report["p"] = args.p;
  report["delta"] = args.delta;
  report["m_max"] = args.m_max;
  report["moment_order"] = 2.0 * args.p + args.delta;
  report["moment"] = moment_diagnostic(sample, args.p, args.delta);
  out << report.dump(2) << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wasserstein distances, multiscale bounds and DPM contraction studies on the real line",
               "wasserline"};
  app.require_subcommand(1, 1);

  DistanceArgs distance;
  auto* distance_cmd = app.add_subcommand("distance", "W_p between two measures");
  distance_cmd->add_option("--p", distance.p, "order (real >= 1 or inf)")->required();
  distance_cmd->add_option("--a", distance.a, "first measure CSV")->required();
  distance_cmd->add_option("--b", distance.b, "second measure CSV")->required();
  distance_cmd->add_flag("--power", distance.power, "print W_p^p instead of W_p");

  BoundArgs bound;
  auto* bound_cmd = app.add_subcommand("bound", "multiscale upper bound on W_p^p");
  bound_cmd->add_option("--mode", bound.mode, "compact | unbounded | combined")
      ->check(CLI::IsMember({"compact", "unbounded", "combined"}));
  bound_cmd->add_option("--p", bound.p, "order p >= 1")->required();
  bound_cmd->add_option("--L", bound.levels, "number of dyadic levels");
  bound_cmd->add_option("--M", bound.blocks, "number of blocks (combined)");
  bound_cmd->add_option("--delta", bound.delta, "tail exponent margin (combined)");
  bound_cmd->add_option("--K", bound.k, "tail constant (combined; default: smallest valid)");
  bound_cmd->add_option("--inner", bound.inner, "exact | recursive (unbounded)")
      ->check(CLI::IsMember({"exact", "recursive"}));
  bound_cmd->add_option("--a", bound.a, "first measure CSV")->required();
  bound_cmd->add_option("--b", bound.b, "second measure CSV")->required();

  DiscretizeArgs disc;
  auto* disc_cmd = app.add_subcommand("discretize", "quantile-grid approximation Q_M");
  disc_cmd->add_option("--dist", disc.dist, "uniform | normal | laplace | t5 | t10 | t20")->required();
  disc_cmd->add_option("--M", disc.m, "even grid size >= 4")->required();
  disc_cmd->add_flag("--error-bound", disc.error_bound, "print the W_p^p error bound");
  disc_cmd->add_option("--p", disc.p, "order for the error bound");
  disc_cmd->add_option("--out", disc.out, "write Q_M CSV here");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("dpm-fit", "fit a DP Gaussian mixture and draw from its predictive");
  fit_cmd->add_option("--data", fit.data, "single-column CSV of observations")->required();
  fit_cmd->add_option("--mixture", fit.mixture, "location | location-scale")
      ->check(CLI::IsMember({"location", "location-scale"}));
  fit_cmd->add_option("--burnin", fit.burn_in, "burn-in sweeps");
  fit_cmd->add_option("--draws", fit.draws, "predictive draws kept");
  fit_cmd->add_option("--thinning", fit.thinning, "sweeps per kept draw");
  fit_cmd->add_option("--seed", fit.seed, "random seed");
  fit_cmd->add_option("--fixed-sigma", fit.fixed_sigma, "fix the kernel standard deviation");
  fit_cmd->add_option("--mu-h", fit.mu_h);
  fit_cmd->add_option("--sigma-h", fit.sigma_h);
  fit_cmd->add_option("--beta", fit.beta);
  fit_cmd->add_option("--lambda", fit.lambda);
  fit_cmd->add_option("--beta-alpha", fit.beta_alpha);
  fit_cmd->add_option("--lambda-alpha", fit.lambda_alpha);
  fit_cmd->add_option("--out", fit.out, "predictive CSV path");
  fit_cmd->add_option("--diagnostics", fit.diagnostics, "diagnostics JSON path");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "run a contraction study from a JSON config");
  sim_cmd->add_option("--config", sim.config, "study config JSON")->required();
  sim_cmd->add_option("--workers", sim.workers, "worker threads");

  DiagnoseArgs diag;
  auto* diag_cmd = app.add_subcommand("diagnose", "tail-mass profile and moment diagnostics");
  diag_cmd->add_option("--sample", diag.sample, "sample or measure CSV")->required();
  diag_cmd->add_option("--p", diag.p, "order p >= 1")->required();
  diag_cmd->add_option("--delta", diag.delta, "moment margin");
  diag_cmd->add_option("--m-max", diag.m_max, "largest block checked");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (*distance_cmd) return run_distance(distance, out);
    if (*bound_cmd) return run_bound(bound, out);
    if (*disc_cmd) return run_discretize(disc, out);
    if (*fit_cmd) return run_fit(fit, out);
    if (*sim_cmd) return run_simulate(sim, out, err);
    if (*diag_cmd) return run_diagnose(diag, out);
  } catch (const HypothesisError& e) {
    err << "error: " << e.what() << '\n';
    return kHypothesisError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace wasserline::cli
