#pragma once

#include <cstdint>
#include <string_view>

namespace prmforge::rng {

// splitmix64 finalizer. Good avalanche, cheap, and stable across platforms.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a over raw bytes.
constexpr std::uint64_t hash_bytes(std::string_view s,
                                   std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/**
 * Named-stream splitter over one root seed.
 *
 * Every consumer derives its own stream by label (and/or index), so draws
 * are reproducible regardless of evaluation order or worker count:
 *
 *   Stream root(seed);
 *   auto per_problem = root.derive("annotate").derive(problem.id);
 *
 * The generator is splitmix64; unit draws use the top 53 bits so results
 * do not depend on the platform's distribution implementation.
 */
class Stream {
 public:
  explicit Stream(std::uint64_t state) : state_(state) {}

  Stream derive(std::string_view label) const {
    return Stream(mix64(state_ ^ hash_bytes(label)));
  }
  Stream derive(std::uint64_t index) const {
    return Stream(mix64(state_ ^ (index * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

 private:
  std::uint64_t state_;
};

}  // namespace prmforge::rng
