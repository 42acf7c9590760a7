#include <cmath>
#include <cstdlib>
#include <cstring>

#include "whistle/kernels.hpp"
#include "whistle/philox.hpp"

namespace whistle::kernels {

std::uint64_t threshold(double boundary) {
    if (!(boundary > 0.0)) return 0;
    if (boundary >= 1.0) return std::uint64_t(1) << 32;
    return static_cast<std::uint64_t>(std::ceil(boundary * 0x1.0p32));
}

CompiledLedger::CompiledLedger(std::span<const EventSpec> events) {
    const std::size_t n = events.size();
    t_ic_.reserve(n);
    t_inc_.reserve(n);
    sign_mask_.reserve(n);
    for (const auto& e : events) {
        t_ic_.push_back(threshold(e.b_ic));
        t_inc_.push_back(threshold(e.b_inc));
        sign_mask_.push_back(e.sign < 0 ? -1 : 0);
    }
    const std::size_t padded = (n + kTile - 1) / kTile * kTile;
    // Padding events have zero thresholds and always resolve to a correct call.
    tiled_t_ic_.assign(padded, 0);
    tiled_t_inc_.assign(padded, 0);
    tiled_sign_mask_.assign(padded, 0);
    for (std::size_t e = 0; e < n; ++e) {
        const std::size_t tile = e / kTile;
        const std::size_t k = (e % kTile) / 4;
        const std::size_t w = e % 4;
        const std::size_t slot = tile * kTile + 4 * w + k;
        tiled_t_ic_[slot] = t_ic_[e];
        tiled_t_inc_[slot] = t_inc_[e];
        tiled_sign_mask_[slot] = sign_mask_[e];
    }
}

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "?";
}

bool isa_available(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(WHISTLE_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Isa preferred_isa() noexcept {
    if (const char* forced = std::getenv("WHISTLE_ISA"); forced && std::strcmp(forced, "scalar") == 0) {
        return Isa::Scalar;
    }
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::int64_t whistle_gain_scalar(const CompiledLedger& ledger, std::uint64_t seed, std::uint32_t replicate) noexcept {
    const auto key = rng::key_from_seed(seed);
    const auto t_ic = ledger.t_ic();
    const auto t_inc = ledger.t_inc();
    const auto sign = ledger.sign_mask();
    rng::Counter words{};
    std::int64_t gain = 0;
    for (std::size_t e = 0; e < ledger.size(); ++e) {
        if (e % 4 == 0) {
            const std::uint64_t block = e / 4;
            words = rng::philox4x32({std::uint32_t(block), std::uint32_t(block >> 32), replicate,
                                     static_cast<std::uint32_t>(rng::Stream::WhistleGain)},
                                    key);
        }
        const std::uint64_t x = words[e % 4];
        // incorrect non-call: +1, incorrect call: -1, from the committer's view
        const std::int64_t v = std::int64_t(x < t_inc[e]) - 2 * std::int64_t(x < t_ic[e]);
        gain += (v ^ sign[e]) - sign[e];
    }
    return gain;
}

#if !defined(WHISTLE_HAVE_AVX2)
std::int64_t whistle_gain_avx2(const CompiledLedger& ledger, std::uint64_t seed, std::uint32_t replicate) noexcept {
    return whistle_gain_scalar(ledger, seed, replicate);
}
#endif

void whistle_gain_batch(const CompiledLedger& ledger, std::uint64_t seed, std::uint32_t first_replicate,
                        std::span<std::int64_t> out, Isa isa) {
    auto kernel = (isa == Isa::Avx2 && isa_available(Isa::Avx2)) ? &whistle_gain_avx2 : &whistle_gain_scalar;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = kernel(ledger, seed, first_replicate + static_cast<std::uint32_t>(i));
    }
}

}  // namespace whistle::kernels
