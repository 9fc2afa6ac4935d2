#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wasserline/measures.hpp"

namespace wasserline {

enum class DistributionKind { uniform, normal, laplace, student_t };

// Analytic distribution on the real line used as ground truth: uniform(0,1),
// standard normal, Laplace(0,1) or Student's t with nu degrees of freedom.
// All kinds are symmetric about their median.
class ReferenceDistribution {
 public:
  static ReferenceDistribution uniform();
  static ReferenceDistribution normal();
  static ReferenceDistribution laplace();
  static ReferenceDistribution student_t(double dof);

  // uniform | normal | laplace | t5 | t10 | t20
  static ReferenceDistribution from_name(std::string_view name);
  static const std::vector<std::string>& names();

  std::string name() const;
  DistributionKind kind() const noexcept { return kind_; }
  double dof() const noexcept { return dof_; }

  double quantile(double u) const;
  double cdf(double x) const;
  double density(double x) const;
  double median() const;

  // T(t, p) = int_t^inf (x - t)^p dP(x); +inf when the moment diverges.
  double upper_tail_moment(double t, double p) const;

 private:
  ReferenceDistribution(DistributionKind kind, double dof) : kind_(kind), dof_(dof) {}

  double tail_moment_by_quadrature(double t, double p) const;

  DistributionKind kind_;
  double dof_;
};

// Standard normal quantile: rational initial guess polished by a Halley step
// on the CDF.
double normal_quantile(double u);

// Quantile-grid approximation Q_M: x_k = q(1/2 + k/M) for k < M/2, mass 2/M
// on the median x_0 and 1/M on each x_k and its reflection for k >= 1.
DiscreteMeasure discretize(const ReferenceDistribution& dist, int m);

// Upper bound for W_p^p(P0, Q_M):
//   2 T(x_{M/2-1}, p) + (2 / (M/2 - 1)) sum_{k=1}^{M/2-1} |x_k - x_{k-1}|^p.
// Returns +inf when the tail moment diverges.
double approx_error_bound(const ReferenceDistribution& dist, int m, double p);

// n inverse-CDF draws from a seeded 64-bit Mersenne twister, sorted.
SortedSample sample(const ReferenceDistribution& dist, std::size_t n, std::uint64_t seed);

}  // namespace wasserline
