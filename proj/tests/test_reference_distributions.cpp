#include <doctest.h>

#include <boost/math/distributions/laplace.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numeric>

#include "wasserline/error.hpp"
#include "wasserline/reference_distributions.hpp"
#include "wasserline/wasserstein.hpp"

using namespace wasserline;

namespace {

double boost_quantile(const ReferenceDistribution& d, double u) {
  switch (d.kind()) {
    case DistributionKind::uniform: return u;
    case DistributionKind::normal: return boost::math::quantile(boost::math::normal_distribution<>(), u);
    case DistributionKind::laplace: return boost::math::quantile(boost::math::laplace_distribution<>(), u);
    case DistributionKind::student_t:
      return boost::math::quantile(boost::math::students_t_distribution<>(d.dof()), u);
  }
  return NAN;
}

double boost_density(const ReferenceDistribution& d, double x) {
  switch (d.kind()) {
    case DistributionKind::uniform: return (x > 0 && x < 1) ? 1.0 : 0.0;
    case DistributionKind::normal: return boost::math::pdf(boost::math::normal_distribution<>(), x);
    case DistributionKind::laplace: return boost::math::pdf(boost::math::laplace_distribution<>(), x);
    case DistributionKind::student_t:
      return boost::math::pdf(boost::math::students_t_distribution<>(d.dof()), x);
  }
  return NAN;
}

// T(t, p) by adaptive Gauss-Kronrod on [t, inf) (uniform: on [max(t,0), 1]).
double tail_oracle(const ReferenceDistribution& d, double t, double p) {
  auto f = [&](double x) { return x <= t ? 0.0 : std::pow(x - t, p) * boost_density(d, x); };
  using boost::math::quadrature::gauss_kronrod;
  if (d.kind() == DistributionKind::uniform) {
    const double lo = std::max(t, 0.0);
    return lo >= 1.0 ? 0.0 : gauss_kronrod<double, 61>::integrate(f, lo, 1.0, 15, 1e-14);
  }
  double total = 0.0;
  // Split at 0 so the Laplace kink is an endpoint.
  if (t < 0.0) {
    total += gauss_kronrod<double, 61>::integrate(f, t, 0.0, 15, 1e-14);
    total += gauss_kronrod<double, 61>::integrate(f, 0.0, INFINITY, 15, 1e-14);
  } else {
    total = gauss_kronrod<double, 61>::integrate(f, t, INFINITY, 15, 1e-14);
  }
  return total;
}

std::vector<ReferenceDistribution> all_distributions() {
  std::vector<ReferenceDistribution> out;
  for (const auto& name : ReferenceDistribution::names()) out.push_back(ReferenceDistribution::from_name(name));
  return out;
}

}  // namespace

TEST_SUITE("reference_distributions") {

TEST_CASE("names") {
  CHECK(ReferenceDistribution::names() ==
        std::vector<std::string>{"uniform", "normal", "laplace", "t5", "t10", "t20"});
  for (const auto& name : ReferenceDistribution::names()) {
    CHECK(ReferenceDistribution::from_name(name).name() == name);
  }
  CHECK_THROWS_AS(ReferenceDistribution::from_name("cauchy"), DataError);
  CHECK(ReferenceDistribution::from_name("t10").dof() == 10.0);
}

TEST_CASE("quantiles agree with Boost.Math to 1e-10 relative") {
  for (const auto& d : all_distributions()) {
    for (double u : {1e-12, 1e-8, 2.5e-6, 1e-3, 0.02425, 0.1, 0.3, 0.5, 0.75, 0.9, 0.975, 1 - 1e-6, 1 - 1e-10}) {
      const double expected = boost_quantile(d, u);
      const double got = d.quantile(u);
      INFO(d.name(), " u=", u);
      CHECK(std::fabs(got - expected) <= 1e-10 * std::max(1.0, std::fabs(expected)));
    }
    CHECK_THROWS_AS(d.quantile(0.0), DataError);
    CHECK_THROWS_AS(d.quantile(1.0), DataError);
  }
  CHECK(normal_quantile(0.75) == doctest::Approx(0.6744897501960817).epsilon(1e-14));
}

TEST_CASE("q(F(x)) = x on the support") {
  for (const auto& d : all_distributions()) {
    const double lo = d.kind() == DistributionKind::uniform ? 0.01 : -8.0;
    const double hi = d.kind() == DistributionKind::uniform ? 0.99 : 8.0;
    for (int k = 0; k <= 200; ++k) {
      const double x = lo + (hi - lo) * k / 200.0;
      INFO(d.name(), " x=", x);
      // Rounding F(x) to a double moves it by eps F(x), i.e. eps F(x) / f(x) in x.
      const double conditioning = 4 * std::numeric_limits<double>::epsilon() * d.cdf(x) / d.density(x);
      CHECK(std::fabs(d.quantile(d.cdf(x)) - x) <= 1e-9 * std::max(1.0, std::fabs(x)) + conditioning);
      CHECK(d.density(x) == doctest::Approx(boost_density(d, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("medians") {
  CHECK(ReferenceDistribution::uniform().median() == 0.5);
  for (const auto& name : {"normal", "laplace", "t5", "t10", "t20"}) {
    CHECK(ReferenceDistribution::from_name(name).median() == 0.0);
  }
}

TEST_CASE("upper tail moment: closed forms and quadrature agree with the oracle") {
  for (const auto& d : all_distributions()) {
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      for (double t : {-1.5, -0.2, 0.0, 0.3, 0.6744897501960817, 1.7, 3.5}) {
        const double got = d.upper_tail_moment(t, p);
        const double expected = tail_oracle(d, t, p);
        INFO(d.name(), " p=", p, " t=", t);
        CHECK(std::fabs(got - expected) <= 1e-8 * std::max(1.0, expected));
      }
    }
  }
}

TEST_CASE("upper tail moment diverges exactly when p >= nu") {
  const auto t5 = ReferenceDistribution::student_t(5);
  CHECK(std::isinf(t5.upper_tail_moment(1.0, 5.0)));
  CHECK(std::isinf(t5.upper_tail_moment(1.0, 8.0)));
  CHECK(std::isfinite(t5.upper_tail_moment(1.0, 4.5)));
  CHECK(std::isinf(ReferenceDistribution::student_t(10).upper_tail_moment(0.0, 10.0)));
  CHECK(std::isfinite(ReferenceDistribution::normal().upper_tail_moment(0.0, 8.0)));
}

TEST_CASE("discretize examples") {
  const auto n4 = discretize(ReferenceDistribution::normal(), 4);
  REQUIRE(n4.size() == 3);
  const double q75 = boost::math::quantile(boost::math::normal_distribution<>(), 0.75);
  CHECK(n4.atoms()[0] == doctest::Approx(-q75).epsilon(1e-14));
  CHECK(n4.atoms()[1] == 0.0);
  CHECK(n4.atoms()[2] == doctest::Approx(q75).epsilon(1e-14));
  CHECK(std::vector<double>(n4.weights().begin(), n4.weights().end()) == std::vector<double>{0.25, 0.5, 0.25});

  const auto u4 = discretize(ReferenceDistribution::uniform(), 4);
  CHECK(std::vector<double>(u4.atoms().begin(), u4.atoms().end()) == std::vector<double>{0.25, 0.5, 0.75});

  CHECK_THROWS_AS(discretize(ReferenceDistribution::normal(), 5), DataError);
  CHECK_THROWS_AS(discretize(ReferenceDistribution::normal(), 2), DataError);
}

TEST_CASE("discretize: mass accounting and exact symmetry") {
  for (const auto& d : all_distributions()) {
    for (int m : {4, 10, 64, 1000}) {
      const auto q = discretize(d, m);
      REQUIRE(q.size() == std::size_t(m - 1));
      const double total = std::accumulate(q.weights().begin(), q.weights().end(), 0.0);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      const double c = d.median();
      for (std::size_t k = 0; k < q.size(); ++k) {
        const std::size_t mirror = q.size() - 1 - k;
        if (k < mirror) CHECK(q.atoms()[k] == 2 * c - q.atoms()[mirror]);
        CHECK(q.weights()[k] == q.weights()[mirror]);
      }
      CHECK(q.weights()[q.size() / 2] == 2.0 / m);
    }
  }
}

TEST_CASE("approx_error_bound examples") {
  const double q = boost::math::quantile(boost::math::normal_distribution<>(), 0.75);
  const double phi = boost::math::pdf(boost::math::normal_distribution<>(), q);
  const double hand = 2 * (phi - q * 0.25) + 2 * q;
  const double got = approx_error_bound(ReferenceDistribution::normal(), 4, 1.0);
  CHECK(got == doctest::Approx(hand).epsilon(1e-13));
  CHECK(got == doctest::Approx(1.647).epsilon(1e-3 / 1.647));
  for (int m : {4, 16, 1024}) CHECK(std::isinf(approx_error_bound(ReferenceDistribution::student_t(5), m, 8.0)));
  // Uniform: the tail term is the last half-cell only.
  double previous = INFINITY;
  for (int m = 4; m <= 1 << 14; m *= 2) {
    const double b = approx_error_bound(ReferenceDistribution::uniform(), m, 1.0);
    CHECK(b < previous);
    previous = b;
  }
  CHECK(previous < 1e-3);
}

TEST_CASE("approx_error_bound non-increasing for M = 2^4 .. 2^12") {
  for (const auto& d : all_distributions()) {
    for (double p : {1.0, 2.0}) {
      double previous = INFINITY;
      for (int e = 4; e <= 12; ++e) {
        const double b = approx_error_bound(d, 1 << e, p);
        INFO(d.name(), " p=", p, " M=", (1 << e));
        CHECK(std::isfinite(b));
        CHECK(b <= previous);
        previous = b;
      }
    }
  }
}

TEST_CASE("approx_error_bound dominates the distance between grids") {
  // W_p^p(Q_M, Q_2M) <= 2^(p-1) (bound(M) + bound(2M)) by the triangle inequality.
  for (const auto& d : all_distributions()) {
    for (double p : {1.0, 2.0}) {
      double previous = INFINITY;
      for (int m : {16, 64, 256, 1024}) {
        const double w = wp_quantile(discretize(d, m), discretize(d, 2 * m), p);
        const double b = approx_error_bound(d, m, p) + approx_error_bound(d, 2 * m, p);
        CHECK(w <= std::exp2(p - 1) * b);
        CHECK(w < previous);
        previous = w;
      }
    }
  }
}

TEST_CASE("sample") {
  const auto a = sample(ReferenceDistribution::normal(), 1, 42);
  const auto b = sample(ReferenceDistribution::normal(), 1, 42);
  CHECK(a[0] == b[0]);
  const auto u = sample(ReferenceDistribution::uniform(), 10000, 3);
  CHECK(u[0] > 0.0);
  CHECK(u[u.size() - 1] < 1.0);
  const auto big = sample(ReferenceDistribution::normal(), 100000, 5);
  double mean = 0.0;
  for (double x : big.values()) mean += x;
  mean /= double(big.size());
  double var = 0.0;
  for (double x : big.values()) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / double(big.size() - 1));
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(sd - 1.0) < 0.02);
  CHECK(sample(ReferenceDistribution::laplace(), 1000, 9).values().size() == 1000);
  CHECK_THROWS_AS(sample(ReferenceDistribution::normal(), 0, 1), DataError);
}

}  // TEST_SUITE
