#pragma once

#include <cstdint>
#include <vector>

namespace edrvfl {

// SplitMix64 finalizer (Vigna). Bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(a) ^ b);
}

// Counter-based uniform stream: draw i is a pure function of (seed,
// stream_id, i), so fills are deterministic and independent of call order.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_(mix64(seed, mix64(stream_id))) {}

  // [0, 1) with 53 random bits.
  double unit(std::uint64_t i) const {
    const std::uint64_t bits = mix64(key_ + (i + 1) * 0x9e3779b97f4a7c15ULL);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  // [-1, 1)
  double symmetric(std::uint64_t i) const { return 2.0 * unit(i) - 1.0; }

 private:
  std::uint64_t key_;
};

// Small sequential generator for shuffles. Hand-rolled so that split
// results do not depend on the standard library's distribution internals.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Multiply-shift; bias is < n / 2^32, irrelevant here.
  std::uint32_t next_below(std::uint32_t n) {
    const std::uint32_t r = static_cast<std::uint32_t>(next() >> 32);
    return static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(r) * n) >> 32);
  }

 private:
  std::uint64_t state_;
};

// Fisher-Yates with our own generator, for platform-stable shuffles.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint32_t j = rng.next_below(static_cast<std::uint32_t>(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace edrvfl
