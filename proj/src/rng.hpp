#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mlb {

// Seeded stream usable as a UniformRandomBitGenerator. Child streams are
// derived from (seed, label) so concurrent workers never share state.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed);

  RngStream derive(std::uint64_t label) const;
  RngStream derive(std::string_view label) const;

  std::uint64_t seed() const { return seed_; }

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace mlb
