#pragma once

#include <iosfwd>

namespace wasserline::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kDataError = 2;
inline constexpr int kHypothesisError = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wasserline::cli
