#include "wasserline/seeding.hpp"

#include <bit>

namespace wasserline {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x9E3779B97F4A7C15ULL;
  for (std::uint64_t part : parts) h = splitmix64(h ^ splitmix64(part));
  return h;
}

std::uint64_t double_bits(double value) noexcept {
  if (value == 0.0) value = 0.0;  // fold -0.0
  return std::bit_cast<std::uint64_t>(value);
}

}  // namespace wasserline
