#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "wasserline/measures.hpp"

namespace wasserline::testing {

// Hand-rolled generators; every property test draws from a fixed seed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  // Atom in (lo, hi]; with probability 1/4 snapped to a dyadic grid point so
  // that boundary conventions get exercised.
  double atom(double lo, double hi) {
    double x = uniform(lo, hi);
    if (integer(0, 3) == 0) {
      const double step = std::ldexp(1.0, -integer(0, 4));
      x = std::ceil(x / step) * step;
      if (x <= lo) x += step;
      if (x > hi) x = hi;
    }
    return x;
  }

  std::vector<double> atoms(std::size_t n, double lo, double hi) {
    std::vector<double> out(n);
    for (auto& x : out) x = atom(lo, hi);
    return out;
  }

  // Integer weights k_i / D, kept so that oracles can expand the measure into
  // an equal-weight sample of size D.
  struct Rational {
    std::vector<double> atoms;
    std::vector<int> counts;
    int denominator = 0;
    DiscreteMeasure measure() const {
      std::vector<double> w(counts.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = double(counts[i]) / denominator;
      return DiscreteMeasure(atoms, w);
    }
    std::vector<double> expanded() const {
      std::vector<double> out;
      for (std::size_t i = 0; i < atoms.size(); ++i) out.insert(out.end(), counts[i], atoms[i]);
      std::sort(out.begin(), out.end());
      return out;
    }
  };

  Rational rational(std::size_t max_atoms, int denominator, double lo, double hi) {
    Rational r;
    r.denominator = denominator;
    const std::size_t n = std::size_t(integer(1, int(std::min<std::size_t>(max_atoms, denominator))));
    r.atoms = atoms(n, lo, hi);
    r.counts.assign(n, 1);
    for (int left = denominator - int(n); left > 0; --left) ++r.counts[std::size_t(integer(0, int(n) - 1))];
    return r;
  }

  DiscreteMeasure measure(std::size_t max_atoms, double lo, double hi) {
    const std::size_t n = std::size_t(integer(1, int(max_atoms)));
    std::vector<double> w(n);
    for (auto& x : w) x = uniform(0.05, 1.0);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    return DiscreteMeasure(atoms(n, lo, hi), w);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// min over all permutations pi of (1/N) sum |x_k - y_pi(k)|^p.
inline double brute_force_assignment(const std::vector<double>& x, std::vector<double> y, double p) {
  std::sort(y.begin(), y.end());
  double best = INFINITY;
  do {
    double cost = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) cost += std::pow(std::fabs(x[k] - y[k]), p);
    best = std::min(best, cost / double(x.size()));
  } while (std::next_permutation(y.begin(), y.end()));
  return best;
}

// (1/N) sum |x_(k) - y_(k)|^p with plain pow, as an arithmetic reference.
inline double sorted_cost(std::vector<double> x, std::vector<double> y, double p) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double cost = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) cost += std::pow(std::fabs(x[k] - y[k]), p);
  return cost / double(x.size());
}

// W_p^p of two rational measures via their common-denominator expansions.
inline double expanded_cost(const Gen::Rational& a, const Gen::Rational& b, double p) {
  const int d = std::lcm(a.denominator, b.denominator);
  auto expand = [d](const Gen::Rational& r) {
    std::vector<double> out;
    const int factor = d / r.denominator;
    for (std::size_t i = 0; i < r.atoms.size(); ++i) out.insert(out.end(), r.counts[i] * factor, r.atoms[i]);
    return out;
  };
  return sorted_cost(expand(a), expand(b), p);
}

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace wasserline::testing
