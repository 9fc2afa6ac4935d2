#pragma once

#include <stdexcept>
#include <string>

namespace wasserline {

// Invalid input data or arguments: malformed measures, out-of-range orders,
// support violations.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bound's hypothesis does not hold for the given pair of measures.
class HypothesisError : public std::runtime_error {
 public:
  HypothesisError(const std::string& what, int block)
      : std::runtime_error(what), block_(block) {}

  int block() const noexcept { return block_; }

 private:
  int block_;
};

}  // namespace wasserline
