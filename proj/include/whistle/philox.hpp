#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw is
// a pure function of (key, counter), so any work partition reproduces the
// same stream.

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace whistle::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;
inline constexpr int kPhiloxRounds = 10;

constexpr Counter philox4x32(Counter ctr, Key key) noexcept {
    for (int round = 0; round < kPhiloxRounds; ++round) {
        const std::uint64_t p0 = std::uint64_t(kPhiloxM0) * ctr[0];
        const std::uint64_t p1 = std::uint64_t(kPhiloxM1) * ctr[2];
        ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1), std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
               std::uint32_t(p0)};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

constexpr Key key_from_seed(std::uint64_t seed) noexcept {
    return {std::uint32_t(seed), std::uint32_t(seed >> 32)};
}

/// Stream tags keep independent uses of one seed from sharing counters.
enum class Stream : std::uint32_t {
    WhistleGain = 1,
    RaceNull = 2,
    Synth = 3,
    RaceSynth = 4,
};

/// Maps a 32-bit word to [0, 1) with 2^-32 resolution (exact in double).
constexpr double to_unit(std::uint32_t x) noexcept { return double(x) * 0x1.0p-32; }

/// 53-bit uniform in [0, 1) from two words.
constexpr double to_unit53(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (std::uint64_t(hi) << 21) ^ (std::uint64_t(lo) >> 11);
    return double(bits & ((std::uint64_t(1) << 53) - 1)) * 0x1.0p-53;
}

/// SplitMix64 finalizer, used to derive child seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// FNV-1a over bytes, for hashing entity keys into seeds.
constexpr std::uint64_t fnv1a(std::string_view bytes) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) noexcept {
    return mix64(parent ^ mix64(fnv1a(label)));
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return mix64(parent ^ mix64(index + 0x632BE59BD9B4E019ull));
}

/// Sequential view over a Philox stream, satisfying UniformRandomBitGenerator
/// so it can drive <random> distributions. Position (block, word) is explicit.
class PhiloxEngine {
public:
    using result_type = std::uint32_t;

    PhiloxEngine(std::uint64_t seed, std::uint32_t stream_hi, std::uint32_t stream_lo = 0) noexcept
        : key_(key_from_seed(seed)), hi_(stream_hi), lo_(stream_lo) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (word_ == 4) {
            buffer_ = philox4x32({std::uint32_t(block_), std::uint32_t(block_ >> 32), lo_, hi_}, key_);
            ++block_;
            word_ = 0;
        }
        return buffer_[word_++];
    }

    double uniform() noexcept {
        const auto hi = (*this)();
        const auto lo = (*this)();
        return to_unit53(hi, lo);
    }

private:
    Key key_;
    std::uint32_t hi_;
    std::uint32_t lo_;
    std::uint64_t block_ = 0;
    Counter buffer_{};
    int word_ = 4;
};

}  // namespace whistle::rng
