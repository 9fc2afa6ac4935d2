#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wasserline {

// Total weight of a DiscreteMeasure must lie within this distance of 1.
inline constexpr double kWeightTolerance = 1e-12;

// Observations sorted ascending. The constructor rejects unsorted input.
class SortedSample {
 public:
  explicit SortedSample(std::vector<double> values);

  static SortedSample from_unsorted(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

// Probability measure with finitely many atoms on the real line.
//
// Atoms are stored strictly increasing with positive weights. Construction
// sorts, merges duplicate atoms (summing their weights), drops zero weights
// and renormalizes when the total is within kWeightTolerance of 1.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights);

  static DiscreteMeasure dirac(double x);
  // Equal weight on every entry of `points` (duplicates merge).
  static DiscreteMeasure uniform_on(std::span<const double> points);

  std::span<const double> atoms() const noexcept { return atoms_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  double min_atom() const noexcept { return atoms_.front(); }
  double max_atom() const noexcept { return atoms_.back(); }

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

DiscreteMeasure empirical_from_sample(const SortedSample& sample);

// M_p(P) = sum_k w_k |x_k|^p.
double moment(const DiscreteMeasure& measure, double p);

// Index m of the dyadic block B_m containing x, where B_0 = (-1, 1] and
// B_m = (-2^m, 2^m] \ (-2^(m-1), 2^(m-1)] for m >= 1.
int block_index(double x);

double block_mass(const DiscreteMeasure& measure, int m);

// Largest block index carrying mass.
int max_block(const DiscreteMeasure& measure);

// Restriction of the measure to B_m, renormalized and mapped into (-1, 1]
// by x -> x / 2^m. Throws DataError("empty block") when P(B_m) = 0.
DiscreteMeasure restrict_rescale(const DiscreteMeasure& measure, int m);

// Index j of the level-l dyadic cell (-1 + j 2^(1-l), -1 + (j+1) 2^(1-l)]
// containing x. Requires x in (-1, 1].
std::size_t cell_index(double x, int level);

// Masses of the 2^l dyadic cells of (-1, 1] in index order.
// Throws DataError("support violation") when an atom lies outside (-1, 1].
std::vector<double> cell_masses(const DiscreteMeasure& measure, int level);

// |x|^p with the zero case short-circuited.
double abs_pow(double x, double p);

// Compensated (Neumaier) sum.
double stable_sum(std::span<const double> values);

}  // namespace wasserline
