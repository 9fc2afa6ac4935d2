#include "wasserline/reference_distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "wasserline/error.hpp"

namespace wasserline {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_density(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Rational approximation of the standard normal quantile, relative error
// about 1e-9 before refinement.
double normal_quantile_guess(double u) {
  static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (u < kLow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double student_t_density(double x, double dof) {
  const double log_norm = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                          0.5 * std::log(dof * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (dof + 1.0) * std::log1p(x * x / dof));
}

double student_t_cdf(double x, double dof) {
  const double x2 = x * x;
  if (x2 < dof) {
    const double half = 0.5 * boost::math::ibeta(0.5, 0.5 * dof, x2 / (dof + x2));
    return x >= 0.0 ? 0.5 + half : 0.5 - half;
  }
  const double tail = 0.5 * boost::math::ibeta(0.5 * dof, 0.5, dof / (dof + x2));
  return x >= 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double u, double dof) {
  if (u == 0.5) return 0.0;
  const double tail = std::min(u, 1.0 - u);
  double one_minus_z = 0.0;
  const double z = boost::math::ibeta_inv(0.5 * dof, 0.5, 2.0 * tail, &one_minus_z);
  const double magnitude = std::sqrt(dof * one_minus_z / z);
  return u > 0.5 ? magnitude : -magnitude;
}

void require_probability(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DataError("quantile argument must lie in (0, 1)");
}

// Split at the kink x = 0. Right of it: (1/2) e^-t Gamma(p+1, -t); left of it
// a smooth integrand on [t, 0].
double laplace_tail_below_zero(double t, double p) {
  const double right = 0.5 * std::exp(-t) * boost::math::tgamma(p + 1.0, -t);
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double left = integrator.integrate(
      [&](double u) { return 0.5 * std::pow(u, p) * std::exp(u + t); }, 0.0, -t, 1e-14);
  return left + right;
}

}  // namespace

double normal_quantile(double u) {
  require_probability(u);
  if (u > 0.5) return -normal_quantile(1.0 - u);
  double x = normal_quantile_guess(u);
  const double e = normal_cdf(x) - u;
  const double step = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= step / (1.0 + 0.5 * x * step);
  return x;
}

ReferenceDistribution ReferenceDistribution::uniform() {
  return ReferenceDistribution(DistributionKind::uniform, 0.0);
}
ReferenceDistribution ReferenceDistribution::normal() {
  return ReferenceDistribution(DistributionKind::normal, 0.0);
}
ReferenceDistribution ReferenceDistribution::laplace() {
  return ReferenceDistribution(DistributionKind::laplace, 0.0);
}
ReferenceDistribution ReferenceDistribution::student_t(double dof) {
  if (!(dof > 0.0) || !std::isfinite(dof)) throw DataError("degrees of freedom must be positive");
  return ReferenceDistribution(DistributionKind::student_t, dof);
}

const std::vector<std::string>& ReferenceDistribution::names() {
  static const std::vector<std::string> kNames = {"uniform", "normal", "laplace",
                                                  "t5",      "t10",    "t20"};
  return kNames;
}

ReferenceDistribution ReferenceDistribution::from_name(std::string_view name) {
  if (name == "uniform") return uniform();
  if (name == "normal") return normal();
  if (name == "laplace") return laplace();
  if (name == "t5") return student_t(5.0);
  if (name == "t10") return student_t(10.0);
  if (name == "t20") return student_t(20.0);
  throw DataError("unknown distribution: " + std::string(name));
}

std::string ReferenceDistribution::name() const {
  switch (kind_) {
    case DistributionKind::uniform: return "uniform";
    case DistributionKind::normal: return "normal";
    case DistributionKind::laplace: return "laplace";
    case DistributionKind::student_t: {
      if (dof_ == std::floor(dof_)) return "t" + std::to_string(static_cast<long long>(dof_));
      return "t" + std::to_string(dof_);
    }
  }
  return "unknown";
}

double ReferenceDistribution::quantile(double u) const {
  require_probability(u);
  switch (kind_) {
    case DistributionKind::uniform: return u;
    case DistributionKind::normal: return normal_quantile(u);
    case DistributionKind::laplace:
      return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
    case DistributionKind::student_t: return student_t_quantile(u, dof_);
  }
  return 0.0;
}

double ReferenceDistribution::cdf(double x) const {
  switch (kind_) {
    case DistributionKind::uniform: return std::clamp(x, 0.0, 1.0);
    case DistributionKind::normal: return normal_cdf(x);
    case DistributionKind::laplace: return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
    case DistributionKind::student_t: return student_t_cdf(x, dof_);
  }
  return 0.0;
}

double ReferenceDistribution::density(double x) const {
  switch (kind_) {
    case DistributionKind::uniform: return (x > 0.0 && x < 1.0) ? 1.0 : 0.0;
    case DistributionKind::normal: return normal_density(x);
    case DistributionKind::laplace: return 0.5 * std::exp(-std::fabs(x));
    case DistributionKind::student_t: return student_t_density(x, dof_);
  }
  return 0.0;
}

double ReferenceDistribution::median() const {
  return kind_ == DistributionKind::uniform ? 0.5 : 0.0;
}

double ReferenceDistribution::upper_tail_moment(double t, double p) const {
  if (!(p > 0.0) || !std::isfinite(p)) throw DataError("tail moment order must be positive");
  if (!std::isfinite(t)) throw DataError("tail moment threshold must be finite");
  switch (kind_) {
    case DistributionKind::uniform: {
      if (t >= 1.0) return 0.0;
      const double upper = std::pow(1.0 - t, p + 1.0);
      const double lower = t < 0.0 ? std::pow(-t, p + 1.0) : 0.0;
      return (upper - lower) / (p + 1.0);
    }
    case DistributionKind::normal: {
      const double upper_tail = 0.5 * std::erfc(t / std::numbers::sqrt2);
      if (p == 1.0) return normal_density(t) - t * upper_tail;
      if (p == 2.0) return (1.0 + t * t) * upper_tail - t * normal_density(t);
      return tail_moment_by_quadrature(t, p);
    }
    case DistributionKind::laplace:
      if (t >= 0.0) return 0.5 * std::exp(-t) * std::tgamma(p + 1.0);
      return laplace_tail_below_zero(t, p);
    case DistributionKind::student_t:
      if (p >= dof_) return kInf;
      return tail_moment_by_quadrature(t, p);
  }
  return 0.0;
}

double ReferenceDistribution::tail_moment_by_quadrature(double t, double p) const {
  boost::math::quadrature::exp_sinh<double> integrator;
  const auto integrand = [&](double s) {
    const double f = density(t + s);
    if (s == 0.0 || f == 0.0) return 0.0;
    return std::exp(p * std::log(s)) * f;
  };
  return integrator.integrate(integrand, 0.0, kInf, 1e-13);
}

DiscreteMeasure discretize(const ReferenceDistribution& dist, int m) {
  if (m < 4 || m % 2 != 0) throw DataError("M must be an even integer >= 4");
  const int half = m / 2;
  const double center = dist.median();
  const double md = static_cast<double>(m);

  std::vector<double> right(static_cast<std::size_t>(half));
  right[0] = center;
  for (int k = 1; k < half; ++k) right[static_cast<std::size_t>(k)] = dist.quantile(0.5 + k / md);

  std::vector<double> atoms;
  std::vector<double> weights;
  atoms.reserve(static_cast<std::size_t>(m - 1));
  weights.reserve(static_cast<std::size_t>(m - 1));
  for (int k = half - 1; k >= 1; --k) {
    atoms.push_back(2.0 * center - right[static_cast<std::size_t>(k)]);
    weights.push_back(1.0 / md);
  }
  atoms.push_back(center);
  weights.push_back(2.0 / md);
  for (int k = 1; k < half; ++k) {
    atoms.push_back(right[static_cast<std::size_t>(k)]);
    weights.push_back(1.0 / md);
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

double approx_error_bound(const ReferenceDistribution& dist, int m, double p) {
  if (m < 4 || m % 2 != 0) throw DataError("M must be an even integer >= 4");
  if (!(p >= 1.0) || !std::isfinite(p)) throw DataError("order p must be a finite real >= 1");
  const int last = m / 2 - 1;
  const double md = static_cast<double>(m);

  std::vector<double> grid(static_cast<std::size_t>(last) + 1);
  grid[0] = dist.median();
  for (int k = 1; k <= last; ++k) grid[static_cast<std::size_t>(k)] = dist.quantile(0.5 + k / md);

  const double tail = dist.upper_tail_moment(grid.back(), p);
  if (std::isinf(tail)) return kInf;

  std::vector<double> spacings(static_cast<std::size_t>(last));
  for (int k = 1; k <= last; ++k) {
    spacings[static_cast<std::size_t>(k - 1)] =
        abs_pow(grid[static_cast<std::size_t>(k)] - grid[static_cast<std::size_t>(k - 1)], p);
  }
  return 2.0 * tail + (2.0 / static_cast<double>(last)) * stable_sum(spacings);
}

SortedSample sample(const ReferenceDistribution& dist, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DataError("sample size must be >= 1");
  std::mt19937_64 engine(seed);
  std::vector<double> values(n);
  for (auto& v : values) {
    // 53 random bits, offset by half a step so u is never 0 or 1.
    const double u = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
    v = dist.quantile(u);
  }
  return SortedSample::from_unsorted(std::move(values));
}

}  // namespace wasserline
