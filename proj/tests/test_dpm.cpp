#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "wasserline/dpm.hpp"
#include "wasserline/error.hpp"
#include "wasserline/reference_distributions.hpp"
#include "wasserline/wasserstein.hpp"

using namespace wasserline;

namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments moments_of(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= double(v.size());
  for (double x : v) m.variance += (x - m.mean) * (x - m.mean);
  m.variance /= double(v.size() - 1);
  return m;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    worst = std::max(worst, std::fabs(double(i) / a.size() - double(j) / b.size()));
  }
  return worst;
}

// Checks a draw set against N(mean, variance) within 3 standard errors for
// both the mean and the variance (normal-theory SE of s^2 is s2 sqrt(2/(n-1))).
void check_normal_moments(const std::vector<double>& draws, double mean, double variance) {
  const Moments m = moments_of(draws);
  const double n = double(draws.size());
  CHECK(std::fabs(m.mean - mean) <= 3.0 * std::sqrt(variance / n));
  CHECK(std::fabs(m.variance - variance) <= 3.0 * variance * std::sqrt(2.0 / (n - 1)));
}

SortedSample two_blobs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 0.5);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = (i % 2 ? 10.0 : -10.0) + noise(rng);
  return SortedSample::from_unsorted(std::move(y));
}

}  // namespace

TEST_SUITE("dpm") {

TEST_CASE("config validation") {
  DpmConfig config;
  CHECK_NOTHROW(config.validate());
  config.sigma_h = 0.0;
  CHECK_THROWS_AS(config.validate(), DataError);
  config = {};
  config.lambda_alpha = -1.0;
  CHECK_THROWS_AS(config.validate(), DataError);
  config = {};
  config.mixture = MixtureKind::location_scale;
  config.fixed_sigma = 1.0;
  CHECK_THROWS_AS(config.validate(), DataError);
  ChainConfig chain;
  chain.n_draws = 0;
  CHECK_THROWS_AS(chain.validate(), DataError);
  chain = {};
  chain.thinning = 0;
  CHECK_THROWS_AS(chain.validate(), DataError);
  CHECK(parse_mixture_kind("location-scale") == MixtureKind::location_scale);
  CHECK(to_string(MixtureKind::location) == "location");
  CHECK_THROWS_AS(parse_mixture_kind("scale"), DataError);
}

TEST_CASE("init_state") {
  const DpmConfig config;
  SUBCASE("n = 1") {
    Rng rng(1);
    const auto state = init_state(SortedSample({0.3}), config, rng);
    CHECK(state.occupancy() == std::vector<std::size_t>{1});
    CHECK_NOTHROW(state.check_invariants(1));
  }
  SUBCASE("deterministic and valid") {
    const auto data = sample(ReferenceDistribution::normal(), 50, 3);
    Rng a(9);
    Rng b(9);
    const auto s1 = init_state(data, config, a);
    const auto s2 = init_state(data, config, b);
    CHECK(s1.locations == s2.locations);
    CHECK(s1.alpha == s2.alpha);
    CHECK(s1.kernel_variance == s2.kernel_variance);
    CHECK_NOTHROW(s1.check_invariants(50));
    CHECK(s1.occupied_clusters() == 1);
  }
  SUBCASE("empty data") {
    Rng rng(1);
    CHECK_THROWS_AS(init_state(SortedSample({}), config, rng), DataError);
  }
}

TEST_CASE("cluster location conditional is N(0.5, 0.5) for one datum y = 1") {
  DpmConfig config;
  config.fixed_sigma = 1.0;
  Rng rng(2024);
  std::vector<double> direct(10000);
  for (auto& z : direct) z = draw_cluster_location(1.0, 1, 1.0, config, rng);
  check_normal_moments(direct, 0.5, 0.5);

  // The same conditional as exercised inside a sweep.
  const SortedSample data({1.0});
  std::vector<double> in_sweep(10000);
  for (auto& z : in_sweep) {
    DpmState state = init_state(data, config, rng);
    state.assignments = {0};
    gibbs_step(state, data, config, rng);
    z = state.locations[0];
  }
  check_normal_moments(in_sweep, 0.5, 0.5);
}

TEST_CASE("location-scale conditional matches the normal-inverse-gamma posterior") {
  // One cluster with y = 1, H = NIG(0, 1, 1, 1): v | y ~ IG(1.5, 1.25),
  // z | v, y ~ N(0.5, v / 2). Marginal mean of z is 0.5; E[v] = 2.5.
  DpmConfig config;
  config.mixture = MixtureKind::location_scale;
  const SortedSample data({1.0});
  Rng rng(77);
  std::vector<double> z(20000);
  std::vector<double> v(20000);
  for (std::size_t k = 0; k < z.size(); ++k) {
    DpmState state = init_state(data, config, rng);
    gibbs_step(state, data, config, rng);
    z[k] = state.locations[0];
    v[k] = state.variances[0];
  }
  const Moments mz = moments_of(z);
  // z - 0.5 is a scaled t with 3 dof and variance E[v]/2 = 1.25.
  CHECK(std::fabs(mz.mean - 0.5) <= 3.0 * std::sqrt(1.25 / z.size()));
  std::vector<double> inv(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) inv[k] = 1.0 / v[k];
  const Moments mi = moments_of(inv);
  // 1/v ~ Gamma(1.5, rate 1.25): mean 1.2, variance 0.96.
  CHECK(std::fabs(mi.mean - 1.2) <= 3.0 * std::sqrt(0.96 / inv.size()));
}

TEST_CASE("sweeps preserve the state invariants") {
  for (auto mixture : {MixtureKind::location, MixtureKind::location_scale}) {
    DpmConfig config;
    config.mixture = mixture;
    const auto data = sample(ReferenceDistribution::student_t(5), 120, 4);
    Rng rng(5);
    auto state = init_state(data, config, rng);
    for (int s = 0; s < 300; ++s) {
      gibbs_step(state, data, config, rng);
      REQUIRE_NOTHROW(state.check_invariants(data.size()));
      std::size_t total = 0;
      for (std::size_t c : state.occupancy()) total += c;
      REQUIRE(total == data.size());
      REQUIRE(std::isfinite(state.alpha));
    }
  }
}

TEST_CASE("identical observations stay valid") {
  const SortedSample data(std::vector<double>(40, 2.5));
  DpmConfig config;
  Rng rng(6);
  auto state = init_state(data, config, rng);
  for (int s = 0; s < 200; ++s) {
    gibbs_step(state, data, config, rng);
    REQUIRE_NOTHROW(state.check_invariants(40));
  }
}

TEST_CASE("extreme data far from the base measure stay finite") {
  const SortedSample data({-1e4, 0.0, 1e4});
  DpmConfig config;
  Rng rng(8);
  auto state = init_state(data, config, rng);
  for (int s = 0; s < 200; ++s) {
    gibbs_step(state, data, config, rng);
    REQUIRE_NOTHROW(state.check_invariants(3));
  }
}

TEST_CASE("two separated blobs are never merged") {
  const auto data = two_blobs(100, 10);
  DpmConfig config;
  // A base measure covering both blobs; under N(0, 1) the chain sits in a
  // single wide cluster for a very long time.
  config.sigma_h = 10.0;
  Rng rng(11);
  auto state = init_state(data, config, rng);
  for (int s = 0; s < 500; ++s) gibbs_step(state, data, config, rng);
  int twos = 0;
  const int kept = 500;
  for (int s = 0; s < kept; ++s) {
    gibbs_step(state, data, config, rng);
    std::vector<int> sign(state.sticks(), 0);
    bool mixed = false;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const int side = data[i] > 0 ? 1 : -1;
      int& seen = sign[state.assignments[i]];
      if (seen != 0 && seen != side) mixed = true;
      seen = side;
    }
    REQUIRE_FALSE(mixed);
    twos += state.occupied_clusters() == 2;
  }
  CHECK(twos > kept / 2);

  ChainConfig chain;
  chain.burn_in = 500;
  chain.n_draws = 500;
  chain.seed = 11;
  const auto result = run_chain(data, config, chain);
  // The predictive is bimodal: almost nothing falls between the blobs.
  const auto near_zero = std::count_if(result.draws.begin(), result.draws.end(),
                                       [](double x) { return std::fabs(x) < 5.0; });
  CHECK(double(near_zero) < 0.05 * double(result.draws.size()));
}

TEST_CASE("posterior predictive draw") {
  DpmConfig config;
  DpmState state;
  state.assignments = {0};
  state.stick_fractions = {1.0 - 0x1.0p-53};
  state.weights = {1.0 - 0x1.0p-53};
  state.locations = {0.0};
  state.kernel_variance = 1.0;
  state.alpha = 1e-6;
  Rng rng(12);
  std::vector<double> draws(20000);
  for (auto& x : draws) x = posterior_predictive_draw(state, config, rng);
  check_normal_moments(draws, 0.0, 1.0);

  Rng a(3);
  Rng b(3);
  CHECK(posterior_predictive_draw(state, config, a) == posterior_predictive_draw(state, config, b));
}

TEST_CASE("run_chain bookkeeping and determinism") {
  const auto data = sample(ReferenceDistribution::normal(), 30, 1);
  DpmConfig config;
  ChainConfig chain;
  chain.burn_in = 0;
  chain.n_draws = 1;
  chain.seed = 4;
  const auto one = run_chain(data, config, chain);
  CHECK(one.draws.size() == 1);
  CHECK(one.diagnostics.sweeps == 1);

  chain.burn_in = 50;
  chain.n_draws = 200;
  chain.thinning = 2;
  const auto a = run_chain(data, config, chain);
  const auto b = run_chain(data, config, chain);
  CHECK(a.draws == b.draws);
  CHECK(a.diagnostics.alpha == b.diagnostics.alpha);
  CHECK(a.diagnostics.sweeps == 450);
  CHECK(a.diagnostics.alpha.size() == 200);
  CHECK(a.diagnostics.kernel_variance.size() == 200);
  chain.seed = 5;
  CHECK(run_chain(data, config, chain).draws != a.draws);
}

TEST_CASE("prior recovery: one datum, large alpha, fixed kernel") {
  DpmConfig config;
  config.fixed_sigma = 1.0;
  config.beta_alpha = 2000.0;  // alpha concentrates near 2000
  config.lambda_alpha = 1.0;
  ChainConfig chain;
  chain.burn_in = 100;
  chain.n_draws = 10000;
  chain.seed = 13;
  const auto posterior = run_chain(SortedSample({1.0}), config, chain).draws;
  const auto prior = prior_predictive_sample(config, 10000, 14);
  CHECK(ks_distance(posterior, prior) < 0.03);
  // The prior predictive is N(0, sigma_h^2 + sigma^2) = N(0, 2).
  check_normal_moments(prior, 0.0, 2.0);
}

TEST_CASE("posterior predictive beats the prior predictive on normal data") {
  const auto reference = discretize(ReferenceDistribution::normal(), 20000);
  DpmConfig config;
  int wins = 0;
  const int runs = 20;
  for (int r = 0; r < runs; ++r) {
    const auto data = sample(ReferenceDistribution::normal(), 200, 100 + r);
    ChainConfig chain;
    chain.burn_in = 500;
    chain.n_draws = 2000;
    chain.seed = 200 + r;
    const auto draws = run_chain(data, config, chain).draws;
    const auto prior = prior_predictive_sample(config, 2000, 300 + r);
    const double fit = wp_quantile(empirical_from_sample(SortedSample::from_unsorted(draws)), reference, 1.0);
    const double base = wp_quantile(empirical_from_sample(SortedSample::from_unsorted(prior)), reference, 1.0);
    if (fit < base) ++wins;
  }
  CHECK(wins >= 19);
}

TEST_CASE("tail_mass_diagnostic") {
  CHECK(tail_mass_diagnostic(DiscreteMeasure::dirac(0.0), 1.0, 5).k_prime == 1.0);
  CHECK(tail_mass_diagnostic(DiscreteMeasure::dirac(0.0), 3.0, 5).k_prime == 1.0);

  SUBCASE("designed profile P(B_m) = 2^-2m") {
    std::vector<double> atoms{0.5};
    std::vector<double> weights{1.0};
    for (int m = 1; m <= 10; ++m) {
      atoms.push_back(0.75 * std::exp2(m));
      weights.push_back(std::exp2(-2.0 * m));
      weights[0] -= weights.back();
    }
    const auto report = tail_mass_diagnostic(DiscreteMeasure(atoms, weights), 2.0, 10);
    CHECK(report.k_prime == 1.0);
    for (int m = 1; m <= 10; ++m) CHECK(report.scaled[std::size_t(m)] == 1.0);
    CHECK(report.mass_beyond == 0.0);
  }
  SUBCASE("heavy profile P(B_m) = 2^-m grows as 2^m_max") {
    std::vector<double> atoms{0.5};
    std::vector<double> weights{1.0};
    for (int m = 1; m <= 12; ++m) {
      atoms.push_back(-0.75 * std::exp2(m));
      weights.push_back(std::exp2(-1.0 * m));
      weights[0] -= weights.back();
    }
    const DiscreteMeasure heavy(atoms, weights);
    for (int m_max : {4, 8, 12}) {
      const auto report = tail_mass_diagnostic(heavy, 2.0, m_max);
      CHECK(report.k_prime == std::exp2(m_max));
      CHECK(report.argmax == m_max);
    }
    CHECK(tail_mass_diagnostic(heavy, 2.0, 4).mass_beyond == doctest::Approx(std::exp2(-4.0) - std::exp2(-12.0)));
  }
  CHECK_THROWS_AS(tail_mass_diagnostic(DiscreteMeasure::dirac(0.0), 0.5, 3), DataError);
}

TEST_CASE("moment_diagnostic") {
  CHECK(moment_diagnostic(DiscreteMeasure::dirac(0.0), 1.0, 1.0) == 0.0);
  CHECK(moment_diagnostic(DiscreteMeasure({-1.0, 1.0}, {0.5, 0.5}), 1.0, 0.5) == 1.0);
  CHECK(moment_diagnostic(DiscreteMeasure::dirac(2.0), 1.0, 1.0) == doctest::Approx(8.0));
  CHECK_THROWS_AS(moment_diagnostic(DiscreteMeasure::dirac(0.0), 1.0, 0.0), DataError);
}

TEST_CASE("predictive moment diagnostic is stable across seeds") {
  const auto data = sample(ReferenceDistribution::normal(), 400, 21);
  DpmConfig config;
  std::vector<double> values;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ChainConfig chain;
    chain.burn_in = 500;
    chain.n_draws = 2000;
    chain.seed = seed;
    const auto draws = run_chain(data, config, chain).draws;
    values.push_back(moment_diagnostic(empirical_from_sample(SortedSample::from_unsorted(draws)), 1.0, 1.0));
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  CHECK(std::isfinite(*hi));
  CHECK(*hi <= 2.0 * *lo);
}

}  // TEST_SUITE
