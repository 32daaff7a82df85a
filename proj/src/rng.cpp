#include "rng.hpp"

namespace mlb {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RngStream RngStream::derive(std::uint64_t label) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(label ^ 0x6a09e667f3bcc908ULL)));
}

RngStream RngStream::derive(std::string_view label) const {
  // FNV-1a, stable across platforms.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive(h);
}

}  // namespace mlb
