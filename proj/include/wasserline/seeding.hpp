#pragma once

#include <cstdint>
#include <initializer_list>

namespace wasserline {

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Folds the parts into one 64-bit seed: h = splitmix64(h ^ splitmix64(part))
// starting from h = 0x9E3779B97F4A7C15, one round per part, in order.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) noexcept;

// Bit pattern of a double, so real-valued grid coordinates can be hashed.
std::uint64_t double_bits(double value) noexcept;

}  // namespace wasserline
