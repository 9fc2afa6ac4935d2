#include "wasserline/dpm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "wasserline/error.hpp"

namespace wasserline {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogTwoPi = std::log(2.0 * std::numbers::pi);

// Uniform on the open interval (0, 1).
double uniform01(Rng& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

// log of a Gamma(shape, 1) draw, accurate for shapes well below 1.
double log_gamma_draw(double shape, Rng& rng) {
  if (shape >= 1.0) return std::log(std::gamma_distribution<double>(shape, 1.0)(rng));
  const double boosted = std::gamma_distribution<double>(shape + 1.0, 1.0)(rng);
  return std::log(boosted) + std::log(uniform01(rng)) / shape;
}

double gamma_draw(double shape, double rate, Rng& rng) {
  return std::exp(log_gamma_draw(shape, rng)) / rate;
}

double inverse_gamma_draw(double shape, double rate, Rng& rng) {
  return std::exp(-log_gamma_draw(shape, rng)) * rate;
}

// Beta(a, b), kept strictly inside (0, 1).
double beta_draw(double a, double b, Rng& rng) {
  const double la = log_gamma_draw(a, rng);
  const double lb = log_gamma_draw(b, rng);
  const double v = 1.0 / (1.0 + std::exp(lb - la));
  return std::clamp(v, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
}

struct ClusterParams {
  double location;
  double variance;
};

ClusterParams draw_from_base(const DpmConfig& config, double kernel_variance, Rng& rng) {
  if (config.mixture == MixtureKind::location) {
    return {config.mu_h + config.sigma_h * standard_normal(rng), kernel_variance};
  }
  const double variance = inverse_gamma_draw(config.beta, config.lambda, rng);
  const double location = config.mu_h + std::sqrt(variance / config.sigma_h) * standard_normal(rng);
  return {location, variance};
}

// Normal-inverse-gamma conjugate update for one location-scale cluster.
ClusterParams draw_location_scale_posterior(double sum, double sum_sq, std::size_t count,
                                            const DpmConfig& config, Rng& rng) {
  if (count == 0) return draw_from_base(config, 0.0, rng);
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  const double scatter = std::max(sum_sq - n * mean * mean, 0.0);
  const double precision = config.sigma_h + n;
  const double post_mean = (config.sigma_h * config.mu_h + sum) / precision;
  const double shape = config.beta + 0.5 * n;
  const double rate = config.lambda + 0.5 * scatter +
                      0.5 * config.sigma_h * n * (mean - config.mu_h) * (mean - config.mu_h) / precision;
  const double variance = inverse_gamma_draw(shape, rate, rng);
  const double location = post_mean + std::sqrt(variance / precision) * standard_normal(rng);
  return {location, variance};
}

double draw_kernel_variance_prior(const DpmConfig& config, Rng& rng) {
  if (config.fixed_sigma) return *config.fixed_sigma * *config.fixed_sigma;
  return inverse_gamma_draw(config.beta, config.lambda, rng);
}

struct ClusterStats {
  std::vector<std::size_t> count;
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

ClusterStats collect_stats(const DpmState& state, const SortedSample& data, std::size_t sticks) {
  ClusterStats stats{std::vector<std::size_t>(sticks, 0), std::vector<double>(sticks, 0.0),
                     std::vector<double>(sticks, 0.0)};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t j = state.assignments[i];
    const double y = data[i];
    ++stats.count[j];
    stats.sum[j] += y;
    stats.sum_sq[j] += y * y;
  }
  return stats;
}

void recompute_weights(DpmState& state, std::vector<double>& log_weights) {
  const std::size_t sticks = state.stick_fractions.size();
  state.weights.resize(sticks);
  log_weights.resize(sticks);
  double log_rest = 0.0;
  for (std::size_t j = 0; j < sticks; ++j) {
    const double v = state.stick_fractions[j];
    log_weights[j] = std::log(v) + log_rest;
    state.weights[j] = std::exp(log_weights[j]);
    log_rest += std::log1p(-v);
  }
}

}  // namespace

std::string to_string(MixtureKind kind) {
  return kind == MixtureKind::location ? "location" : "location-scale";
}

MixtureKind parse_mixture_kind(const std::string& text) {
  if (text == "location") return MixtureKind::location;
  if (text == "location-scale" || text == "location_scale") return MixtureKind::location_scale;
  throw DataError("unknown mixture: " + text);
}

void DpmConfig::validate() const {
  if (!std::isfinite(mu_h)) throw DataError("mu_H must be finite");
  for (double value : {sigma_h, beta, lambda, beta_alpha, lambda_alpha}) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw DataError("DPM hyperparameters must be positive and finite");
    }
  }
  if (fixed_sigma) {
    if (!(*fixed_sigma > 0.0)) throw DataError("fixed sigma must be positive");
    if (mixture != MixtureKind::location) {
      throw DataError("fixed sigma applies to the location mixture only");
    }
  }
  if (!(slice_kappa > 0.0 && slice_kappa < 1.0)) throw DataError("slice kappa must lie in (0, 1)");
}

void ChainConfig::validate() const {
  if (burn_in < 0) throw DataError("burn-in must be non-negative");
  if (n_draws < 1) throw DataError("number of draws must be >= 1");
  if (thinning < 1) throw DataError("thinning must be >= 1");
}

std::vector<std::size_t> DpmState::occupancy() const {
  std::vector<std::size_t> counts(sticks(), 0);
  for (std::size_t j : assignments) ++counts[j];
  return counts;
}

std::size_t DpmState::occupied_clusters() const {
  const auto counts = occupancy();
  return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(),
                                                [](std::size_t c) { return c > 0; }));
}

double DpmState::variance_of(std::size_t stick) const {
  return variances.empty() ? kernel_variance : variances[stick];
}

void DpmState::check_invariants(std::size_t n) const {
  if (assignments.size() != n) throw std::logic_error("assignment count differs from data size");
  const std::size_t j_count = sticks();
  if (stick_fractions.size() != j_count || weights.size() != j_count) {
    throw std::logic_error("stick arrays differ in length");
  }
  if (!variances.empty() && variances.size() != j_count) {
    throw std::logic_error("variance array differs in length");
  }
  for (std::size_t j : assignments) {
    if (j >= j_count) throw std::logic_error("assignment points past the live sticks");
  }
  const auto counts = occupancy();
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  if (total != n) throw std::logic_error("occupancy does not sum to n");
  for (std::size_t j = 0; j < j_count; ++j) {
    if (!std::isfinite(weights[j]) || weights[j] < 0.0) throw std::logic_error("bad stick weight");
    if (!std::isfinite(locations[j])) throw std::logic_error("non-finite location");
    if (!(variance_of(j) > 0.0) || !std::isfinite(variance_of(j))) {
      throw std::logic_error("non-positive variance");
    }
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::logic_error("non-positive alpha");
}

double draw_cluster_location(double sum, std::size_t count, double variance,
                             const DpmConfig& config, Rng& rng) {
  const double prior_precision = 1.0 / (config.sigma_h * config.sigma_h);
  const double precision = prior_precision + static_cast<double>(count) / variance;
  const double post_variance = 1.0 / precision;
  const double post_mean = post_variance * (config.mu_h * prior_precision + sum / variance);
  return post_mean + std::sqrt(post_variance) * standard_normal(rng);
}

DpmState init_state(const SortedSample& data, const DpmConfig& config, Rng& rng) {
  config.validate();
  if (data.empty()) throw DataError("empty sample");
  DpmState state;
  const std::size_t n = data.size();
  state.assignments.assign(n, 0);
  state.alpha = gamma_draw(config.beta_alpha, config.lambda_alpha, rng);
  state.kernel_variance = draw_kernel_variance_prior(config, rng);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (double y : data.values()) {
    sum += y;
    sum_sq += y * y;
  }
  if (config.mixture == MixtureKind::location) {
    state.locations = {draw_cluster_location(sum, n, state.kernel_variance, config, rng)};
  } else {
    const ClusterParams params = draw_location_scale_posterior(sum, sum_sq, n, config, rng);
    state.locations = {params.location};
    state.variances = {params.variance};
  }
  state.stick_fractions = {beta_draw(1.0 + static_cast<double>(n), state.alpha, rng)};
  state.weights = {state.stick_fractions[0]};
  return state;
}

void gibbs_step(DpmState& state, const SortedSample& data, const DpmConfig& config, Rng& rng) {
  const std::size_t n = data.size();
  const bool location_only = config.mixture == MixtureKind::location;

  // Sticks past the last occupied one are regenerated from the prior below.
  std::size_t live = 0;
  for (std::size_t j : state.assignments) live = std::max(live, j + 1);
  state.stick_fractions.resize(live);
  state.locations.resize(live);
  if (!location_only) state.variances.resize(live);

  const ClusterStats stats = collect_stats(state, data, live);

  // Stick fractions v_j | assignments ~ Beta(1 + n_j, alpha + sum_{k>j} n_k).
  std::size_t above = n;
  for (std::size_t j = 0; j < live; ++j) {
    above -= stats.count[j];
    state.stick_fractions[j] =
        beta_draw(1.0 + static_cast<double>(stats.count[j]),
                  state.alpha + static_cast<double>(above), rng);
  }

  // alpha | v_0..v_{J-1} ~ Gamma(beta_alpha + J, lambda_alpha - sum log(1 - v_j)).
  double log_survival = 0.0;
  for (double v : state.stick_fractions) log_survival += std::log1p(-v);
  state.alpha = gamma_draw(config.beta_alpha + static_cast<double>(live),
                           config.lambda_alpha - log_survival, rng);

  // Cluster parameters; empty sticks draw from the base measure.
  for (std::size_t j = 0; j < live; ++j) {
    if (location_only) {
      state.locations[j] =
          draw_cluster_location(stats.sum[j], stats.count[j], state.kernel_variance, config, rng);
    } else {
      const ClusterParams params =
          draw_location_scale_posterior(stats.sum[j], stats.sum_sq[j], stats.count[j], config, rng);
      state.locations[j] = params.location;
      state.variances[j] = params.variance;
    }
  }

  if (location_only && !config.fixed_sigma) {
    double scatter = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = data[i] - state.locations[state.assignments[i]];
      scatter += r * r;
    }
    state.kernel_variance = inverse_gamma_draw(config.beta + 0.5 * static_cast<double>(n),
                                               config.lambda + 0.5 * scatter, rng);
  }

  // Slices u_i ~ U(0, xi_{d_i}).
  const double log_kappa = std::log(config.slice_kappa);
  const double log_first = std::log1p(-config.slice_kappa);
  auto log_xi = [&](std::size_t j) { return log_first + static_cast<double>(j) * log_kappa; };
  state.slices.resize(n);
  double log_u_min = 0.0;
  std::vector<double> log_slices(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_slices[i] = std::log(uniform01(rng)) + log_xi(state.assignments[i]);
    state.slices[i] = std::exp(log_slices[i]);
    log_u_min = std::min(log_u_min, log_slices[i]);
  }

  // Instantiate every stick whose slice level xi_j exceeds min_i u_i.
  std::size_t needed = live;
  while (log_xi(needed) > log_u_min) ++needed;
  for (std::size_t j = live; j < needed; ++j) {
    state.stick_fractions.push_back(beta_draw(1.0, state.alpha, rng));
    const ClusterParams params = draw_from_base(config, state.kernel_variance, rng);
    state.locations.push_back(params.location);
    if (!location_only) state.variances.push_back(params.variance);
  }

  std::vector<double> log_weights;
  recompute_weights(state, log_weights);

  // Per-stick constant part of log(w_j / xi_j) + log N(y; z_j, var_j).
  std::vector<double> offset(needed);
  std::vector<double> half_precision(needed);
  for (std::size_t j = 0; j < needed; ++j) {
    const double var = state.variance_of(j);
    offset[j] = log_weights[j] - log_xi(j) - 0.5 * (kLogTwoPi + std::log(var));
    half_precision[j] = 0.5 / var;
  }

  std::vector<double> scores(needed);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = data[i];
    std::size_t candidates = 0;
    double best = kNegInf;
    while (candidates < needed && log_xi(candidates) > log_slices[i]) {
      const double r = y - state.locations[candidates];
      const double s = offset[candidates] - half_precision[candidates] * r * r;
      scores[candidates] = s;
      best = std::max(best, s);
      ++candidates;
    }
    if (candidates == 0 || !std::isfinite(best)) continue;
    double total = 0.0;
    for (std::size_t j = 0; j < candidates; ++j) {
      scores[j] = std::exp(scores[j] - best);
      total += scores[j];
    }
    double target = uniform01(rng) * total;
    std::size_t chosen = candidates - 1;
    for (std::size_t j = 0; j < candidates; ++j) {
      target -= scores[j];
      if (target <= 0.0) {
        chosen = j;
        break;
      }
    }
    state.assignments[i] = chosen;
  }
}

double posterior_predictive_draw(const DpmState& state, const DpmConfig& config, Rng& rng) {
  double target = uniform01(rng);
  ClusterParams params{0.0, 0.0};
  bool found = false;
  for (std::size_t j = 0; j < state.sticks(); ++j) {
    target -= state.weights[j];
    if (target < 0.0) {
      params = {state.locations[j], state.variance_of(j)};
      found = true;
      break;
    }
  }
  if (!found) params = draw_from_base(config, state.kernel_variance, rng);
  return params.location + std::sqrt(params.variance) * standard_normal(rng);
}

std::vector<double> prior_predictive_sample(const DpmConfig& config, std::size_t n,
                                            std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  std::vector<double> draws(n);
  for (auto& x : draws) {
    const double kernel_variance =
        config.mixture == MixtureKind::location ? draw_kernel_variance_prior(config, rng) : 0.0;
    const ClusterParams params = draw_from_base(config, kernel_variance, rng);
    x = params.location + std::sqrt(params.variance) * standard_normal(rng);
  }
  return draws;
}

ChainResult run_chain(const SortedSample& data, const DpmConfig& config, const ChainConfig& chain) {
  config.validate();
  chain.validate();
  Rng rng(chain.seed);
  DpmState state = init_state(data, config, rng);
  ChainResult result;
  for (int s = 0; s < chain.burn_in; ++s) gibbs_step(state, data, config, rng);

  const auto kept = static_cast<std::size_t>(chain.n_draws);
  result.draws.reserve(kept);
  result.diagnostics.alpha.reserve(kept);
  result.diagnostics.occupied.reserve(kept);
  for (int d = 0; d < chain.n_draws; ++d) {
    for (int t = 0; t < chain.thinning; ++t) gibbs_step(state, data, config, rng);
    result.draws.push_back(posterior_predictive_draw(state, config, rng));
    result.diagnostics.alpha.push_back(state.alpha);
    if (config.mixture == MixtureKind::location) {
      result.diagnostics.kernel_variance.push_back(state.kernel_variance);
    }
    result.diagnostics.occupied.push_back(state.occupied_clusters());
  }
  result.diagnostics.sweeps = chain.burn_in + chain.n_draws * chain.thinning;
  return result;
}

TailMassReport tail_mass_diagnostic(const DiscreteMeasure& sample, double p, int m_max) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DataError("order p must be a finite real >= 1");
  if (m_max < 0) throw DataError("m_max must be non-negative");
  TailMassReport report;
  report.block_mass.assign(static_cast<std::size_t>(m_max) + 1, 0.0);
  const auto atoms = sample.atoms();
  const auto weights = sample.weights();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const int m = block_index(atoms[k]);
    if (m <= m_max) {
      report.block_mass[static_cast<std::size_t>(m)] += weights[k];
    } else {
      report.mass_beyond += weights[k];
    }
  }
  report.scaled.resize(report.block_mass.size());
  for (int m = 0; m <= m_max; ++m) {
    const double scaled = std::exp2(p * m) * report.block_mass[static_cast<std::size_t>(m)];
    report.scaled[static_cast<std::size_t>(m)] = scaled;
    if (scaled > report.k_prime) {
      report.k_prime = scaled;
      report.argmax = m;
    }
  }
  return report;
}

double moment_diagnostic(const DiscreteMeasure& sample, double p, double delta) {
  if (!(p >= 1.0)) throw DataError("order p must be >= 1");
  if (!(delta > 0.0)) throw DataError("delta must be positive");
  return moment(sample, 2.0 * p + delta);
}

}  // namespace wasserline
