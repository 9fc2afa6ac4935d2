#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wasserline/measures.hpp"

namespace wasserline {

// Partition of (b_0, b_K] into the half-open cells (b_k, b_{k+1}].
class Partition {
 public:
  explicit Partition(std::vector<double> breakpoints);

  // The 2^l dyadic cells of (-1, 1].
  static Partition dyadic(int level);

  std::size_t size() const noexcept { return breakpoints_.size() - 1; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }

  std::optional<std::size_t> locate(double x) const;

  // Cell masses of the measure, in cell order. Throws DataError("support
  // violation") when an atom falls outside the partition.
  std::vector<double> masses(const DiscreteMeasure& measure) const;

 private:
  std::vector<double> breakpoints_;
};

// Measure obtained by rescaling P inside each cell so that its cell masses
// match Q's: P̄|A_k = (Q(A_k) / P(A_k)) P|A_k.
// Throws DataError("approximation undefined") if some cell has
// P(A_k) = 0 < Q(A_k).
DiscreteMeasure approximate_to(const DiscreteMeasure& p, const DiscreteMeasure& q,
                               const Partition& cells);

// Mass moved by the optimal coupling of P and its approximation to Q:
// (1/2) sum_k |P(A_k) - Q(A_k)|. Same preconditions as approximate_to.
double coupling_discrepancy(const DiscreteMeasure& p, const DiscreteMeasure& q,
                            const Partition& cells);

// Constant of the compact multiscale bound, 2^(3p-2) (1 + 2^p).
double compact_bound_constant(double p);

enum class BoundMode { compact, unbounded, combined };

std::string to_string(BoundMode mode);
BoundMode parse_bound_mode(const std::string& text);

struct ScaleTerm {
  int scale = 0;
  double value = 0.0;
};

// Upper bound on W_p^p together with its decomposition.
//
// compact:   bound = sum(terms) + remainder, terms indexed by level l and
//            remainder = kappa_p 2^(-Lp).
// unbounded: bound = sum(terms), terms indexed by block m.
// combined:  bound = K' (tail_term + resolution_term + discrepancy_term),
//            the three pieces stored in `constants`; terms hold the largest
//            cell discrepancy found inside each block m <= M.
struct BoundReport {
  BoundMode mode = BoundMode::compact;
  double p = 1.0;
  double bound = 0.0;
  std::vector<ScaleTerm> terms;
  double remainder = 0.0;
  std::map<std::string, double> constants;
  bool hypothesis_ok = true;
};

// Level-L compact bound for measures supported in (-1, 1].
BoundReport bound_compact(const DiscreteMeasure& p, const DiscreteMeasure& q, int levels,
                          double order);

// How the rescaled in-block distances of the unbounded bound are evaluated.
struct InnerDistance {
  static InnerDistance exact() { return InnerDistance{}; }
  static InnerDistance recursive(int levels) { return InnerDistance{levels}; }

  bool is_exact() const noexcept { return !levels.has_value(); }

  std::optional<int> levels;
};

// Block decomposition bound over the dyadic blocks B_m.
BoundReport bound_unbounded(const DiscreteMeasure& p, const DiscreteMeasure& q, double order,
                            InnerDistance inner = InnerDistance::exact());

struct TailCheck {
  bool ok = true;
  int block = -1;          // first offending block when !ok
  double worst_ratio = 0;  // max_m (P(B_m) + Q(B_m)) / (K 2^(-exponent m))
};

// Checks P(B_m) + Q(B_m) <= K 2^(-exponent m) for every block with mass.
TailCheck check_tail_condition(const DiscreteMeasure& p, const DiscreteMeasure& q,
                               double exponent, double k);

// max over m <= M, l <= L and cells F of |P(pi_m^{-1}(F) ∩ B_m) - Q(...)|,
// with per-block maxima.
struct BlockDiscrepancy {
  double epsilon = 0.0;
  std::vector<double> per_block;
};

BlockDiscrepancy block_cell_discrepancy(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                        int levels, int blocks);

struct CombinedParams {
  int levels = 1;       // L >= 1
  int blocks = 0;       // M >= 0
  double order = 1.0;   // p >= 1
  double delta = 1.0;   // > 0
  double k = 1.0;       // > 0
};

// K' (2^(-delta M) + 2^(-Lp) + 2^(Mp) L eps) under the tail hypothesis
// P(B_m) + Q(B_m) <= K 2^(-(p+delta) m). Throws HypothesisError naming the
// offending block when the hypothesis fails.
BoundReport bound_combined(const DiscreteMeasure& p, const DiscreteMeasure& q,
                           const CombinedParams& params);

// Hypotheses of the rate variant of the combined bound:
//   P(B_m) + Q(B_m) <= K 2^(-(2p+delta) m)                       for all m
//   |P(pi_m^{-1}F ∩ B_m) - Q(...)| <= K (2+alpha)^(-mp) eps / (l+1)^2
// for m <= M, F in P_l, l <= L. With level_decay = false the (l+1)^-2 factor
// is dropped (the weaker form admissible for p > 1).
struct RateHypothesis {
  double order = 1.0;
  double delta = 1.0;
  double k = 1.0;
  double alpha = 1.0;
  double epsilon = 1.0;
  int levels = 1;
  int blocks = 0;
  bool level_decay = true;
};

struct RateCheck {
  bool ok = true;
  std::string failed;  // "tail" or "cell" when !ok
  int block = -1;
  int level = -1;
};

RateCheck check_rate_hypothesis(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                const RateHypothesis& hypothesis);

}  // namespace wasserline
