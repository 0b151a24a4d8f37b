#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace seqinfo {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
class Philox4x32 {
   public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    [[nodiscard]] static constexpr Counter apply(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = Counter{hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

   private:
    static constexpr std::uint32_t kM0 = 0xD2511F53;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57;
    static constexpr std::uint32_t kW0 = 0x9E3779B9;
    static constexpr std::uint32_t kW1 = 0xBB67AE85;
};

/// Standard normal variates from stream `stream` of a seeded Philox family.
///
/// Block k of the stream is Philox(counter = {k_lo, k_hi, stream_lo,
/// stream_hi}, key = {seed_lo, seed_hi}). Each block's two 64-bit words
/// become uniforms u = (w >> 11 + 0.5) / 2^53 in (0, 1); Box-Muller turns the
/// pair into r cos(2 pi u2), r sin(2 pi u2) with r = sqrt(-2 log u1), emitted
/// in that order.
class NormalStream {
   public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    double next() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const auto out = Philox4x32::apply(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), stream_lo_, stream_hi_},
            key_);
        ++block_;
        const double u1 = to_unit((static_cast<std::uint64_t>(out[1]) << 32) | out[0]);
        const double u2 = to_unit((static_cast<std::uint64_t>(out[3]) << 32) | out[2]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

   private:
    static double to_unit(std::uint64_t w) noexcept {
        return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
    }

    Philox4x32::Key key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Stream of standard normals for replication `stream_index`.
[[nodiscard]] inline NormalStream normal_sampler(std::uint64_t seed, std::uint64_t stream_index) noexcept {
    return NormalStream(seed, stream_index);
}

}  // namespace seqinfo
