#include "wasserline/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wasserline/error.hpp"

namespace wasserline {

namespace {

constexpr int kMaxDenseLevel = 30;
constexpr int kMaxLevel = 52;

}  // namespace

double stable_sum(std::span<const double> values) {
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

double abs_pow(double x, double p) {
  const double a = std::fabs(x);
  if (a == 0.0) return 0.0;
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::exp(p * std::log(a));
}

SortedSample::SortedSample(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw DataError("sample contains a non-finite value");
  }
  if (!std::is_sorted(values_.begin(), values_.end())) {
    throw DataError("sample is not sorted ascending");
  }
}

SortedSample SortedSample::from_unsorted(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return SortedSample(std::move(values));
}

DiscreteMeasure::DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.size() != weights.size()) {
    throw DataError("atoms and weights differ in length");
  }
  if (atoms.empty()) throw DataError("measure has no atoms");

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!std::isfinite(atoms[i])) throw DataError("non-finite atom");
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      throw DataError("weights must be finite and non-negative");
    }
  }
  if (!std::is_sorted(atoms.begin(), atoms.end())) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
  }

  atoms_.reserve(atoms.size());
  weights_.reserve(atoms.size());
  for (std::size_t idx : order) {
    const double w = weights[idx];
    if (w == 0.0) continue;
    if (!atoms_.empty() && atoms_.back() == atoms[idx]) {
      weights_.back() += w;
    } else {
      atoms_.push_back(atoms[idx]);
      weights_.push_back(w);
    }
  }
  if (atoms_.empty()) throw DataError("measure has no positive weight");

  const double total = stable_sum(weights_);
  if (std::fabs(total - 1.0) > kWeightTolerance) {
    throw DataError("weights sum to " + std::to_string(total) + ", expected 1");
  }
  if (total != 1.0) {
    for (double& w : weights_) w /= total;
  }
}

DiscreteMeasure DiscreteMeasure::dirac(double x) { return DiscreteMeasure({x}, {1.0}); }

DiscreteMeasure DiscreteMeasure::uniform_on(std::span<const double> points) {
  if (points.empty()) throw DataError("empty sample");
  std::vector<double> weights(points.size(), 1.0 / static_cast<double>(points.size()));
  return DiscreteMeasure(std::vector<double>(points.begin(), points.end()), std::move(weights));
}

DiscreteMeasure empirical_from_sample(const SortedSample& sample) {
  if (sample.empty()) throw DataError("empty sample");
  const auto values = sample.values();
  const double n = static_cast<double>(values.size());
  std::vector<double> atoms;
  std::vector<double> weights;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    atoms.push_back(values[i]);
    weights.push_back(static_cast<double>(j - i) / n);
    i = j;
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

double moment(const DiscreteMeasure& measure, double p) {
  if (!(p >= 1.0)) throw DataError("moment order must be >= 1");
  const auto atoms = measure.atoms();
  const auto weights = measure.weights();
  std::vector<double> terms(atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) terms[k] = weights[k] * abs_pow(atoms[k], p);
  return stable_sum(terms);
}

int block_index(double x) {
  if (x == 0.0) return 0;
  int exponent = 0;
  const double fraction = std::frexp(std::fabs(x), &exponent);
  // |x| = fraction * 2^exponent with fraction in [0.5, 1).
  int m = exponent;
  if (x > 0.0 && fraction == 0.5) m = exponent - 1;  // x = 2^(e-1) sits on the closed end
  return std::max(m, 0);
}

double block_mass(const DiscreteMeasure& measure, int m) {
  if (m < 0) throw DataError("block index must be non-negative");
  const auto atoms = measure.atoms();
  const auto weights = measure.weights();
  std::vector<double> inside;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (block_index(atoms[k]) == m) inside.push_back(weights[k]);
  }
  return stable_sum(inside);
}

int max_block(const DiscreteMeasure& measure) {
  return std::max(block_index(measure.min_atom()), block_index(measure.max_atom()));
}

DiscreteMeasure restrict_rescale(const DiscreteMeasure& measure, int m) {
  if (m < 0) throw DataError("block index must be non-negative");
  const auto atoms = measure.atoms();
  const auto weights = measure.weights();
  std::vector<double> scaled;
  std::vector<double> mass;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (block_index(atoms[k]) == m) {
      scaled.push_back(std::ldexp(atoms[k], -m));
      mass.push_back(weights[k]);
    }
  }
  if (mass.empty()) throw DataError("empty block");
  const double total = stable_sum(mass);
  for (double& w : mass) w /= total;
  return DiscreteMeasure(std::move(scaled), std::move(mass));
}

std::size_t cell_index(double x, int level) {
  if (level < 0 || level > kMaxLevel) throw DataError("dyadic level out of range");
  if (!(x > -1.0 && x <= 1.0)) throw DataError("support violation");
  const std::size_t cells = std::size_t{1} << level;
  // Cell boundaries -1 + j 2^(1-l) are exact in double; the guess is corrected
  // against them so boundary atoms land in the left (closed-end) cell.
  const double scale = std::ldexp(1.0, level - 1);
  auto j = static_cast<std::ptrdiff_t>(std::ceil((x + 1.0) * scale)) - 1;
  j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(cells) - 1);
  const double width = std::ldexp(1.0, 1 - level);
  while (j > 0 && x <= -1.0 + static_cast<double>(j) * width) --j;
  while (j + 1 < static_cast<std::ptrdiff_t>(cells) && x > -1.0 + static_cast<double>(j + 1) * width) ++j;
  return static_cast<std::size_t>(j);
}

std::vector<double> cell_masses(const DiscreteMeasure& measure, int level) {
  if (level < 0 || level > kMaxDenseLevel) throw DataError("dyadic level out of range");
  std::vector<double> masses(std::size_t{1} << level, 0.0);
  const auto atoms = measure.atoms();
  const auto weights = measure.weights();
  for (std::size_t k = 0; k < atoms.size(); ++k) masses[cell_index(atoms[k], level)] += weights[k];
  return masses;
}

}  // namespace wasserline
