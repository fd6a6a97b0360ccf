#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace jtel {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// Stateless: the output block is a pure function of (key, counter).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Substream of uniforms keyed by (seed, stream_index). Two streams with
/// different indices never overlap; the sequence does not depend on which
/// thread draws it.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_index) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_{stream_index} {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept {
        if (cursor_ == 2) refill();
        const std::uint64_t bits = words_[cursor_++];
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    /// Exponential waiting time with the given rate (> 0).
    double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

    std::uint64_t blocks_drawn() const noexcept { return block_; }

private:
    void refill() noexcept {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                      static_cast<std::uint32_t>(block_ >> 32),
                                      static_cast<std::uint32_t>(stream_),
                                      static_cast<std::uint32_t>(stream_ >> 32)};
        const auto out = Philox4x32::generate(ctr, key_);
        words_[0] = (std::uint64_t{out[0]} << 32) | out[1];
        words_[1] = (std::uint64_t{out[2]} << 32) | out[3];
        cursor_ = 0;
        ++block_;
    }

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> words_{};
    int cursor_ = 2;
};

}  // namespace jtel
