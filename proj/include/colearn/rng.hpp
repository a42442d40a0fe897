#pragma once

#include <cstdint>

namespace colearn {

// Protocol stage a random stream is dedicated to. Values are part of the
// reproducibility contract; do not renumber.
enum class Stage : std::uint64_t {
  kGraph = 1,
  kArms = 2,
  kInitial = 3,
  kCorruption = 4,
  kEmission = 5,
  kDissemination = 6,
  kSampling = 7,
  kAdoption = 8,
  kCell = 9,
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine(std::uint64_t h, std::uint64_t v) noexcept {
  return mix64(h ^ mix64(v));
}

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  std::uint64_t round = 0;
  Stage stage = Stage::kGraph;
  std::uint64_t agent = 0;

  constexpr std::uint64_t hash() const noexcept {
    std::uint64_t h = mix64(seed);
    h = combine(h, replication);
    h = combine(h, round);
    h = combine(h, static_cast<std::uint64_t>(stage));
    return combine(h, agent);
  }
};

// A deterministic random stream (SplitMix64: a Weyl counter passed through
// mix64). Streams are keyed, not chained, so the draws an agent sees in a
// round do not depend on how many draws any other agent consumed or on
// execution order.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream() = default;
  explicit Stream(std::uint64_t seed) : state_(seed) {}
  explicit Stream(const StreamKey& key) : state_(key.hash()) {}

  void reseed(const StreamKey& key) { state_ = key.hash(); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    const std::uint64_t x = state_;
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(x);
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::uint64_t state_ = 0;
};

}  // namespace colearn
