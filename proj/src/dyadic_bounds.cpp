#include "wasserline/dyadic_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "wasserline/error.hpp"
#include "wasserline/wasserstein.hpp"

namespace wasserline {

namespace {

// Unnormalized restriction of a measure, atoms ascending.
struct MassPoints {
  std::vector<double> atoms;
  std::vector<double> weights;
};

MassPoints whole(const DiscreteMeasure& measure) {
  return {{measure.atoms().begin(), measure.atoms().end()},
          {measure.weights().begin(), measure.weights().end()}};
}

// Part of the measure inside B_m, mapped into (-1, 1] by x -> x / 2^m.
MassPoints block_part(const DiscreteMeasure& measure, int m) {
  MassPoints out;
  const auto atoms = measure.atoms();
  const auto weights = measure.weights();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (block_index(atoms[k]) == m) {
      out.atoms.push_back(std::ldexp(atoms[k], -m));
      out.weights.push_back(weights[k]);
    }
  }
  return out;
}

struct CellDifference {
  double l1 = 0.0;
  double max_abs = 0.0;
};

// sum_F |A(F) - B(F)| and max_F |A(F) - B(F)| over the level-l dyadic cells,
// touching only the cells that carry mass.
CellDifference cell_difference(const MassPoints& a, const MassPoints& b, int level) {
  CellDifference out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.atoms.size() || j < b.atoms.size()) {
    const std::size_t ci =
        i < a.atoms.size() ? cell_index(a.atoms[i], level) : static_cast<std::size_t>(-1);
    const std::size_t cj =
        j < b.atoms.size() ? cell_index(b.atoms[j], level) : static_cast<std::size_t>(-1);
    const std::size_t cell = std::min(ci, cj);
    double diff = 0.0;
    while (i < a.atoms.size() && cell_index(a.atoms[i], level) == cell) diff += a.weights[i++];
    while (j < b.atoms.size() && cell_index(b.atoms[j], level) == cell) diff -= b.weights[j++];
    out.l1 += std::fabs(diff);
    out.max_abs = std::max(out.max_abs, std::fabs(diff));
  }
  return out;
}

void require_supported_in_unit_cell(const DiscreteMeasure& measure) {
  if (!(measure.min_atom() > -1.0 && measure.max_atom() <= 1.0)) {
    throw DataError("support violation: atoms must lie in (-1, 1]");
  }
}

void require_order(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DataError("order p must be a finite real >= 1");
}

void require_defined(const std::vector<double>& pm, const std::vector<double>& qm) {
  for (std::size_t k = 0; k < pm.size(); ++k) {
    if (pm[k] == 0.0 && qm[k] > 0.0) throw DataError("approximation undefined");
  }
}

}  // namespace

Partition::Partition(std::vector<double> breakpoints) : breakpoints_(std::move(breakpoints)) {
  if (breakpoints_.size() < 2) throw DataError("partition needs at least two breakpoints");
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    if (!std::isfinite(breakpoints_[k])) throw DataError("non-finite breakpoint");
    if (k > 0 && !(breakpoints_[k] > breakpoints_[k - 1])) {
      throw DataError("partition breakpoints must be strictly increasing");
    }
  }
}

Partition Partition::dyadic(int level) {
  if (level < 0 || level > 30) throw DataError("dyadic level out of range");
  const std::size_t cells = std::size_t{1} << level;
  const double width = std::ldexp(1.0, 1 - level);
  std::vector<double> breakpoints(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j) breakpoints[j] = -1.0 + static_cast<double>(j) * width;
  return Partition(std::move(breakpoints));
}

std::optional<std::size_t> Partition::locate(double x) const {
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  if (it == breakpoints_.begin() || it == breakpoints_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

std::vector<double> Partition::masses(const DiscreteMeasure& measure) const {
  std::vector<double> out(size(), 0.0);
  const auto atoms = measure.atoms();
  const auto weights = measure.weights();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto cell = locate(atoms[k]);
    if (!cell) throw DataError("support violation: atom outside the partition");
    out[*cell] += weights[k];
  }
  return out;
}

DiscreteMeasure approximate_to(const DiscreteMeasure& p, const DiscreteMeasure& q,
                               const Partition& cells) {
  const auto pm = cells.masses(p);
  const auto qm = cells.masses(q);
  require_defined(pm, qm);
  const auto atoms = p.atoms();
  const auto weights = p.weights();
  std::vector<double> reweighted(atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const std::size_t cell = *cells.locate(atoms[k]);
    reweighted[k] = weights[k] * (qm[cell] / pm[cell]);
  }
  return DiscreteMeasure({atoms.begin(), atoms.end()}, std::move(reweighted));
}

double coupling_discrepancy(const DiscreteMeasure& p, const DiscreteMeasure& q,
                            const Partition& cells) {
  const auto pm = cells.masses(p);
  const auto qm = cells.masses(q);
  require_defined(pm, qm);
  double l1 = 0.0;
  for (std::size_t k = 0; k < pm.size(); ++k) l1 += std::fabs(pm[k] - qm[k]);
  return 0.5 * l1;
}

double compact_bound_constant(double p) {
  require_order(p);
  return std::exp2(3.0 * p - 2.0) * (1.0 + std::exp2(p));
}

std::string to_string(BoundMode mode) {
  switch (mode) {
    case BoundMode::compact: return "compact";
    case BoundMode::unbounded: return "unbounded";
    case BoundMode::combined: return "combined";
  }
  return "unknown";
}

BoundMode parse_bound_mode(const std::string& text) {
  if (text == "compact") return BoundMode::compact;
  if (text == "unbounded") return BoundMode::unbounded;
  if (text == "combined") return BoundMode::combined;
  throw DataError("unknown bound mode: " + text);
}

BoundReport bound_compact(const DiscreteMeasure& p, const DiscreteMeasure& q, int levels,
                          double order) {
  require_order(order);
  if (levels < 1 || levels > 52) throw DataError("number of levels L must be in [1, 52]");
  require_supported_in_unit_cell(p);
  require_supported_in_unit_cell(q);

  const double kappa = compact_bound_constant(order);
  const MassPoints a = whole(p);
  const MassPoints b = whole(q);

  BoundReport report;
  report.mode = BoundMode::compact;
  report.p = order;
  double total = 0.0;
  for (int l = 1; l <= levels; ++l) {
    const double l1 = cell_difference(a, b, l).l1;
    const double term = kappa * std::exp2(-l * order) * l1;
    report.terms.push_back({l, term});
    total += term;
  }
  report.remainder = kappa * std::exp2(-levels * order);
  report.bound = total + report.remainder;
  report.constants = {{"kappa_p", kappa}, {"L", static_cast<double>(levels)}};
  return report;
}

BoundReport bound_unbounded(const DiscreteMeasure& p, const DiscreteMeasure& q, double order,
                            InnerDistance inner) {
  require_order(order);
  BoundReport report;
  report.mode = BoundMode::unbounded;
  report.p = order;

  const int last = std::max(max_block(p), max_block(q));
  const double mismatch_factor = std::exp2(order - 1.0);
  double total = 0.0;
  for (int m = 0; m <= last; ++m) {
    const double pm = block_mass(p, m);
    const double qm = block_mass(q, m);
    double term = mismatch_factor * std::fabs(pm - qm);
    const double shared = std::min(pm, qm);
    if (shared > 0.0) {
      const DiscreteMeasure rp = restrict_rescale(p, m);
      const DiscreteMeasure rq = restrict_rescale(q, m);
      const double in_block = inner.is_exact() ? wp_quantile(rp, rq, order)
                                               : bound_compact(rp, rq, *inner.levels, order).bound;
      term += shared * in_block;
    }
    if (term == 0.0) continue;
    term *= std::exp2(m * order);
    report.terms.push_back({m, term});
    total += term;
  }
  report.bound = total;
  if (inner.is_exact()) {
    report.constants = {{"M", static_cast<double>(last)}};
  } else {
    report.constants = {{"M", static_cast<double>(last)},
                        {"kappa_p", compact_bound_constant(order)},
                        {"L", static_cast<double>(*inner.levels)}};
  }
  return report;
}

TailCheck check_tail_condition(const DiscreteMeasure& p, const DiscreteMeasure& q,
                               double exponent, double k) {
  // Relative slack absorbs rounding when K is set to the measured maximum.
  constexpr double kSlack = 1e-12;
  TailCheck check;
  const int last = std::max(max_block(p), max_block(q));
  for (int m = 0; m <= last; ++m) {
    const double mass = block_mass(p, m) + block_mass(q, m);
    if (mass == 0.0) continue;
    const double allowed = k * std::exp2(-exponent * m);
    const double ratio = mass / allowed;
    check.worst_ratio = std::max(check.worst_ratio, ratio);
    if (check.ok && ratio > 1.0 + kSlack) {
      check.ok = false;
      check.block = m;
    }
  }
  return check;
}

BlockDiscrepancy block_cell_discrepancy(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                        int levels, int blocks) {
  if (levels < 0 || levels > 52) throw DataError("number of levels L must be in [0, 52]");
  if (blocks < 0) throw DataError("number of blocks M must be non-negative");
  BlockDiscrepancy out;
  out.per_block.assign(static_cast<std::size_t>(blocks) + 1, 0.0);
  for (int m = 0; m <= blocks; ++m) {
    const MassPoints a = block_part(p, m);
    const MassPoints b = block_part(q, m);
    double worst = 0.0;
    for (int l = 0; l <= levels; ++l) worst = std::max(worst, cell_difference(a, b, l).max_abs);
    out.per_block[static_cast<std::size_t>(m)] = worst;
    out.epsilon = std::max(out.epsilon, worst);
  }
  return out;
}

BoundReport bound_combined(const DiscreteMeasure& p, const DiscreteMeasure& q,
                           const CombinedParams& params) {
  const double order = params.order;
  require_order(order);
  if (params.levels < 1) throw DataError("number of levels L must be >= 1");
  if (params.blocks < 0) throw DataError("number of blocks M must be non-negative");
  if (!(params.delta > 0.0)) throw DataError("delta must be positive");
  if (!(params.k > 0.0)) throw DataError("K must be positive");

  const TailCheck tail = check_tail_condition(p, q, order + params.delta, params.k);
  if (!tail.ok) {
    throw HypothesisError("tail hypothesis failed at m=" + std::to_string(tail.block), tail.block);
  }

  const BlockDiscrepancy disc = block_cell_discrepancy(p, q, params.levels, params.blocks);

  // Coefficients collected from the proof chain:
  //   blocks m > M      : c1 2^(-delta M)
  //   shared in-block   : K kappa_p / (1 - 2^-delta) * 2^(-Lp)
  //   block mismatch    : (2^(p-1) + kappa_p) S_p 2^(Mp) eps
  //   cell discrepancies: kappa_p S_p 2^(Mp) L eps
  // with S_p = 1 / (1 - 2^-p) bounding sum_{m<=M} 2^(mp) / 2^(Mp).
  const double kappa = compact_bound_constant(order);
  const double geometric_delta = 1.0 / (1.0 - std::exp2(-params.delta));
  const double geometric_p = 1.0 / (1.0 - std::exp2(-order));
  const double c1 = params.k * (std::exp2(order - 1.0) + std::exp2(order)) *
                    std::exp2(-params.delta) * geometric_delta;
  const double shared_coefficient = params.k * kappa * geometric_delta;
  const double mismatch_coefficient = (std::exp2(order - 1.0) + kappa) * geometric_p;
  const double cell_coefficient = kappa * geometric_p;
  const double k_prime = c1 + shared_coefficient + mismatch_coefficient + cell_coefficient;

  const double tail_term = std::exp2(-params.delta * params.blocks);
  const double resolution_term = std::exp2(-params.levels * order);
  const double discrepancy_term =
      std::exp2(params.blocks * order) * params.levels * disc.epsilon;

  BoundReport report;
  report.mode = BoundMode::combined;
  report.p = order;
  report.bound = k_prime * (tail_term + resolution_term + discrepancy_term);
  for (int m = 0; m <= params.blocks; ++m) {
    report.terms.push_back({m, disc.per_block[static_cast<std::size_t>(m)]});
  }
  report.constants = {
      {"kappa_p", kappa},
      {"K_prime", k_prime},
      {"c1", c1},
      {"shared_coefficient", shared_coefficient},
      {"mismatch_coefficient", mismatch_coefficient},
      {"cell_coefficient", cell_coefficient},
      {"K", params.k},
      {"delta", params.delta},
      {"L", static_cast<double>(params.levels)},
      {"M", static_cast<double>(params.blocks)},
      {"epsilon", disc.epsilon},
      {"tail_term", tail_term},
      {"resolution_term", resolution_term},
      {"discrepancy_term", discrepancy_term},
      {"tail_ratio", tail.worst_ratio},
  };
  report.hypothesis_ok = true;
  return report;
}

RateCheck check_rate_hypothesis(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                const RateHypothesis& h) {
  require_order(h.order);
  if (!(h.delta > 0.0) || !(h.k > 0.0) || !(h.alpha > 0.0) || !(h.epsilon > 0.0)) {
    throw DataError("delta, K, alpha and epsilon must be positive");
  }
  if (h.levels < 0 || h.blocks < 0) throw DataError("L and M must be non-negative");

  RateCheck check;
  const TailCheck tail = check_tail_condition(p, q, 2.0 * h.order + h.delta, h.k);
  if (!tail.ok) {
    check.ok = false;
    check.failed = "tail";
    check.block = tail.block;
    return check;
  }
  for (int m = 0; m <= h.blocks; ++m) {
    const MassPoints a = block_part(p, m);
    const MassPoints b = block_part(q, m);
    const double scale = h.k * std::pow(2.0 + h.alpha, -m * h.order) * h.epsilon;
    for (int l = 0; l <= h.levels; ++l) {
      const double allowed = h.level_decay ? scale / ((l + 1.0) * (l + 1.0)) : scale;
      if (cell_difference(a, b, l).max_abs > allowed) {
        check.ok = false;
        check.failed = "cell";
        check.block = m;
        check.level = l;
        return check;
      }
    }
  }
  return check;
}

}  // namespace wasserline
