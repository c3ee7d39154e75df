// Counter-based splittable random generator.
//
// Every (seed, stream name) pair owns an independent deterministic stream,
// and each draw is a pure function of (key, counter). Streams can therefore
// be consumed in any order — across modules, Monte-Carlo cells or threads —
// without perturbing one another, and realizations are bit-identical across
// platforms because uniform/normal conversion is done from raw bits instead
// of std::<distribution> (whose output is implementation-defined).
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "rissec/types.hpp"

namespace rissec {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer (Steele et al.): bijective avalanche mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace detail

class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::string_view stream)
      : key_(detail::mix64(detail::mix64(seed + detail::kGolden) ^
                           detail::fnv1a(stream))) {}

  // Raw 64 random bits for counter value `at` (stateless access).
  std::uint64_t bits_at(std::uint64_t at) const {
    return detail::mix64(key_ + (at + 1) * detail::kGolden);
  }

  std::uint64_t next_bits() { return bits_at(counter_++); }

  // Uniform on [0, 1): top 53 bits.
  double uniform() { return to_closed_open(next_bits()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (cosine branch).
  double normal() {
    const double u1 = to_open_closed(next_bits());
    const double u2 = to_closed_open(next_bits());
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Circularly-symmetric complex normal, unit variance: real and imaginary
  // parts are the two Box-Muller branches scaled to variance 1/2 each.
  Complex complex_normal() {
    const double u1 = to_open_closed(next_bits());
    const double u2 = to_closed_open(next_bits());
    const double r = std::sqrt(-std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  // The complex-normal draw for counter pair (2k, 2k+1), independent of any
  // state; lets channel elements be filled in any order or in parallel.
  Complex complex_normal_at(std::uint64_t k) const {
    const double u1 = to_open_closed(bits_at(2 * k));
    const double u2 = to_closed_open(bits_at(2 * k + 1));
    const double r = std::sqrt(-std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  static double to_closed_open(std::uint64_t bits) {  // [0, 1)
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }
  static double to_open_closed(std::uint64_t bits) {  // (0, 1]: log() stays finite
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rissec
