#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wasserline/measures.hpp"

namespace wasserline {

using Rng = std::mt19937_64;

enum class MixtureKind { location, location_scale };

std::string to_string(MixtureKind kind);
MixtureKind parse_mixture_kind(const std::string& text);

// Dirichlet-process Gaussian mixture prior.
//
// location:       H = N(mu_h, sigma_h^2) on the kernel location, with a
//                 shared kernel variance sigma^2 ~ InvGamma(beta, lambda).
// location_scale: H = N-InvGamma(mu_h, sigma_h, beta, lambda), i.e.
//                 variance v ~ InvGamma(beta, lambda) and location | v ~
//                 N(mu_h, v / sigma_h).
// Concentration alpha ~ Gamma(beta_alpha, lambda_alpha) (shape, rate).
struct DpmConfig {
  MixtureKind mixture = MixtureKind::location;
  double mu_h = 0.0;
  double sigma_h = 1.0;
  double beta = 1.0;
  double lambda = 1.0;
  double beta_alpha = 1.0;
  double lambda_alpha = 1.0;
  // Fixes the kernel standard deviation (location mixture only).
  std::optional<double> fixed_sigma;
  // Dependent slice sequence xi_j = (1 - kappa) kappa^j.
  double slice_kappa = 0.5;

  void validate() const;
};

struct ChainConfig {
  int burn_in = 1000;
  int n_draws = 10000;
  int thinning = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Full sampler state. Stick j carries weight w_j, location z_j and (for the
// location-scale mixture) variance v_j; assignments index sticks.
struct DpmState {
  std::vector<std::size_t> assignments;
  std::vector<double> stick_fractions;  // v_j
  std::vector<double> weights;          // w_j = v_j prod_{k<j} (1 - v_k)
  std::vector<double> locations;
  std::vector<double> variances;        // location_scale only
  std::vector<double> slices;           // u_i
  double kernel_variance = 1.0;         // location only
  double alpha = 1.0;

  std::size_t sticks() const noexcept { return locations.size(); }
  std::vector<std::size_t> occupancy() const;
  std::size_t occupied_clusters() const;
  double variance_of(std::size_t stick) const;
  // Throws std::logic_error describing the first broken invariant.
  void check_invariants(std::size_t n) const;
};

// Conditional draw of a cluster location for the location mixture given
// `count` observations summing to `sum` and kernel variance `variance`:
// N(m, s2) with s2 = 1 / (1/sigma_h^2 + count/variance),
// m = s2 (mu_h / sigma_h^2 + sum / variance).
double draw_cluster_location(double sum, std::size_t count, double variance,
                             const DpmConfig& config, Rng& rng);

// All observations in one cluster; kernel variance and alpha from their priors
// and the cluster parameters from their conditional posterior.
DpmState init_state(const SortedSample& data, const DpmConfig& config, Rng& rng);

// One slice-sampler sweep (sticks, alpha, cluster parameters, kernel variance,
// slices, assignments).
void gibbs_step(DpmState& state, const SortedSample& data, const DpmConfig& config, Rng& rng);

// One draw from the mixture defined by the current state; the residual stick
// mass selects a fresh component from the base measure.
double posterior_predictive_draw(const DpmState& state, const DpmConfig& config, Rng& rng);

// Draws from the prior predictive int phi_sigma(x - z) dH(z) d prior(sigma^2).
std::vector<double> prior_predictive_sample(const DpmConfig& config, std::size_t n,
                                            std::uint64_t seed);

struct ChainDiagnostics {
  std::vector<double> alpha;
  std::vector<double> kernel_variance;  // location mixture only
  std::vector<std::size_t> occupied;
  int sweeps = 0;
};

struct ChainResult {
  std::vector<double> draws;  // predictive draws in chain order
  ChainDiagnostics diagnostics;
};

// burn_in discarded sweeps, then n_draws rounds of `thinning` sweeps each
// followed by one predictive draw. Traces record every kept round.
ChainResult run_chain(const SortedSample& data, const DpmConfig& config, const ChainConfig& chain);

// Smallest K' with P(B_m) <= K' 2^(-p m) for all m <= m_max.
struct TailMassReport {
  double k_prime = 0.0;
  int argmax = 0;
  std::vector<double> block_mass;  // P(B_m), m = 0..m_max
  std::vector<double> scaled;      // 2^(p m) P(B_m)
  double mass_beyond = 0.0;        // P(|x| > 2^m_max)
};

TailMassReport tail_mass_diagnostic(const DiscreteMeasure& sample, double p, int m_max);

// M_{2p+delta}(sample).
double moment_diagnostic(const DiscreteMeasure& sample, double p, double delta);

}  // namespace wasserline
