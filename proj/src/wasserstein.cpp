#include "wasserline/wasserstein.hpp"

#include <algorithm>
#include <cfloat>
#include <charconv>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "wasserline/error.hpp"

namespace wasserline {

namespace {

void require_order(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DataError("Wasserstein order must be a finite real >= 1");
}

// Walks the monotone coupling of two discrete measures. For every piece of
// the unit interval on which both quantile functions are constant, calls
// visit(mass, x, y).
template <class Visit>
void for_each_quantile_segment(const DiscreteMeasure& a, const DiscreteMeasure& b, Visit&& visit) {
  const auto xa = a.atoms();
  const auto wa = a.weights();
  const auto xb = b.atoms();
  const auto wb = b.weights();
  std::size_t i = 0;
  std::size_t j = 0;
  double ra = wa[0];
  double rb = wb[0];
  while (i < xa.size() && j < xb.size()) {
    if (ra < rb) {
      visit(ra, xa[i], xb[j]);
      rb -= ra;
      if (++i < xa.size()) ra = wa[i];
    } else if (rb < ra) {
      visit(rb, xa[i], xb[j]);
      ra -= rb;
      if (++j < xb.size()) rb = wb[j];
    } else {
      visit(ra, xa[i], xb[j]);
      if (++i < xa.size()) ra = wa[i];
      if (++j < xb.size()) rb = wb[j];
    }
  }
}

double sorted_power_mean(std::span<const double> x, std::span<const double> y, double p) {
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) total += abs_pow(x[k] - y[k], p);
  return total / static_cast<double>(x.size());
}

bool all_weights_equal(std::span<const double> weights) {
  return std::all_of(weights.begin(), weights.end(), [&](double w) { return w == weights[0]; });
}

}  // namespace

DistanceOrder DistanceOrder::finite(double p) {
  require_order(p);
  DistanceOrder order;
  order.p_ = p;
  order.infinite_ = false;
  return order;
}

DistanceOrder DistanceOrder::parse(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw DataError("invalid order: " + std::string(text));
  return finite(value);
}

double DistanceOrder::value() const {
  if (infinite_) throw DataError("order is infinite");
  return p_;
}

double wp_sorted_equal(const SortedSample& x, const SortedSample& y, double p) {
  require_order(p);
  if (x.size() != y.size()) throw DataError("size mismatch");
  if (x.empty()) throw DataError("empty sample");
  return sorted_power_mean(x.values(), y.values(), p);
}

double wp_quantile(const DiscreteMeasure& a, const DiscreteMeasure& b, double p) {
  require_order(p);
  // Equal-weight inputs of one size: atom k meets atom k, as for sorted samples.
  if (a.size() == b.size() && all_weights_equal(a.weights()) && all_weights_equal(b.weights()) &&
      a.weights()[0] == b.weights()[0]) {
    return sorted_power_mean(a.atoms(), b.atoms(), p);
  }
  double total = 0.0;
  double compensation = 0.0;
  for_each_quantile_segment(a, b, [&](double mass, double x, double y) {
    const double term = mass * abs_pow(x - y, p) - compensation;
    const double next = total + term;
    compensation = (next - total) - term;
    total = next;
  });
  return total;
}

double w1_cdf(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const auto xa = a.atoms();
  const auto wa = a.weights();
  const auto xb = b.atoms();
  const auto wb = b.weights();
  std::size_t i = 0;
  std::size_t j = 0;
  double fa = 0.0;
  double fb = 0.0;
  double total = 0.0;
  double current = std::min(xa[0], xb[0]);
  // Between consecutive merged atoms both CDFs are constant.
  while (i < xa.size() || j < xb.size()) {
    const double next_a = i < xa.size() ? xa[i] : std::numeric_limits<double>::infinity();
    const double next_b = j < xb.size() ? xb[j] : std::numeric_limits<double>::infinity();
    const double next = std::min(next_a, next_b);
    total += std::fabs(fa - fb) * (next - current);
    current = next;
    if (next_a == next) fa += wa[i++];
    if (next_b == next) fb += wb[j++];
  }
  return total;
}

double w_infty(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  // Pieces this short only arise from rounding residue where two cumulative
  // weight breakpoints coincide mathematically.
  constexpr double kNegligibleMass = 64.0 * DBL_EPSILON;
  double sup = 0.0;
  for_each_quantile_segment(a, b, [&](double mass, double x, double y) {
    if (mass > kNegligibleMass) sup = std::max(sup, std::fabs(x - y));
  });
  return sup;
}

double w1_duality_gap(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return std::fabs(moment(a, 1.0) - moment(b, 1.0));
}

double power_to_distance(double power, double p) {
  require_order(p);
  if (power <= 0.0) return 0.0;
  if (p == 1.0) return power;
  if (p == 2.0) return std::sqrt(power);
  return std::pow(power, 1.0 / p);
}

double wasserstein_distance(const DiscreteMeasure& a, const DiscreteMeasure& b,
                            DistanceOrder order) {
  if (order.is_infinite()) return w_infty(a, b);
  const double p = order.value();
  return power_to_distance(wp_quantile(a, b, p), p);
}

}  // namespace wasserline
