#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace doubling {

/// Philox4x64-10 counter-based generator (Salmon et al., Random123).
///
/// A pure function of (counter, key): any block of the stream can be
/// produced without touching the others, which is what makes digit access
/// random-access and independent of thread scheduling.
using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;
using PhiloxBlock = std::array<std::uint64_t, 4>;

constexpr PhiloxBlock philox4x64(PhiloxCounter ctr, PhiloxKey key) noexcept {
  constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * ctr[0];
    const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
    const auto lo0 = static_cast<std::uint64_t>(p0);
    const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
    const auto lo1 = static_cast<std::uint64_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Maps a uniform 64-bit word onto [0, bound) by taking the high word of the
/// 128-bit product.  Bias is at most bound / 2^64.
constexpr std::uint32_t bounded(std::uint64_t word, std::uint32_t bound) noexcept {
  return static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(word) * bound) >> 64);
}

/// Bijection Z -> N used to turn signed site indices into counters:
/// 0, 1, -1, 2, -2, ... -> 0, 1, 2, 3, 4, ...
constexpr std::uint64_t zigzag(std::int64_t n) noexcept {
  if (n == std::numeric_limits<std::int64_t>::min()) return std::numeric_limits<std::uint64_t>::max();
  return n > 0 ? 2 * static_cast<std::uint64_t>(n) - 1
               : 2 * (std::uint64_t{0} - static_cast<std::uint64_t>(n));
}

/// Stream tags keep independent uses of one seed from overlapping.
enum class Stream : std::uint64_t {
  kDigits = 0x6469676974ULL,
  kSubSeed = 0x7375627365ULL,
  kStartVector = 0x7374617274ULL,
};

/// Deterministic child seed for sample `index` of a run keyed by `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return philox4x64({index, 0, static_cast<std::uint64_t>(Stream::kSubSeed), 0},
                    {seed, 0})[0];
}

}  // namespace doubling
