#pragma once

#include <string_view>

#include "wasserline/measures.hpp"

namespace wasserline {

// Order of a Wasserstein distance: a real p >= 1 or infinity.
class DistanceOrder {
 public:
  static DistanceOrder finite(double p);
  static DistanceOrder infinity() noexcept { return DistanceOrder(); }
  // Accepts a decimal >= 1 or "inf" / "infinity".
  static DistanceOrder parse(std::string_view text);

  bool is_infinite() const noexcept { return infinite_; }
  // Throws DataError for the infinite order.
  double value() const;

 private:
  DistanceOrder() = default;
  double p_ = 0.0;
  bool infinite_ = true;
};

// The functions returning W_p^p return the p-th POWER of the distance; use
// wasserstein_distance for the metric itself.

// W_p^p between the empirical measures of two equal-size sorted samples:
// (1/N) sum_k |x_k - y_k|^p.
double wp_sorted_equal(const SortedSample& x, const SortedSample& y, double p);

// W_p^p = int_0^1 |F_P^{-1}(u) - F_Q^{-1}(u)|^p du, evaluated exactly by
// walking the two quantile step functions in O(|P| + |Q|).
double wp_quantile(const DiscreteMeasure& a, const DiscreteMeasure& b, double p);

// W_1 = int |F_P(x) - F_Q(x)| dx, evaluated exactly over the merged atoms.
double w1_cdf(const DiscreteMeasure& a, const DiscreteMeasure& b);

// sup_u |F_P^{-1}(u) - F_Q^{-1}(u)|.
double w_infty(const DiscreteMeasure& a, const DiscreteMeasure& b);

// |M_1(P) - M_1(Q)|, a certified lower bound for W_1(P, Q).
double w1_duality_gap(const DiscreteMeasure& a, const DiscreteMeasure& b);

// p-th root of a W_p^p value.
double power_to_distance(double power, double p);

// W_p (root) for finite orders, W_inf otherwise.
double wasserstein_distance(const DiscreteMeasure& a, const DiscreteMeasure& b,
                            DistanceOrder order);

}  // namespace wasserline
