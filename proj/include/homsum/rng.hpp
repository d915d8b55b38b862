#pragma once

#include <array>
#include <cstdint>

namespace homsum {

/// Philox4x64-10 counter-based block cipher (Salmon et al., Random123).
/// The same key/counter always yields the same 256 output bits, so any
/// draw can be regenerated without replaying the ones before it.
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter ctr, Key key) {
    constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
    constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
    constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
    constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;
    for (int round = 0; round < 10; ++round) {
      const unsigned __int128 p0 = static_cast<unsigned __int128>(kM0) * ctr[0];
      const unsigned __int128 p1 = static_cast<unsigned __int128>(kM1) * ctr[2];
      const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
      const auto lo0 = static_cast<std::uint64_t>(p0);
      const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
      const auto lo1 = static_cast<std::uint64_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }
};

/// SplitMix64 finalizer; used to derive independent sub-seeds from one seed.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag + 0x632BE59BD9B4E019ULL));
}

/// Sequential uniform source keyed by (seed, stream index, draw index).
/// Two RngStreams with the same triple produce identical sequences.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t draw)
      : key_{seed, stream}, counter_{draw, 0, 0, 0} {}

  std::uint64_t next_u64() {
    if (pos_ == 4) refill();
    return buffer_[pos_++];
  }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  void refill() {
    buffer_ = Philox4x64::block(counter_, key_);
    ++counter_[1];
    pos_ = 0;
  }

  Philox4x64::Key key_;
  Philox4x64::Counter counter_;
  Philox4x64::Counter buffer_{};
  int pos_ = 4;
};

}  // namespace homsum
