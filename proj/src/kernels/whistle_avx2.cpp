// AVX2 variant of the whistle-gain kernel. Compiled with -mavx2 and only
// reached after a runtime CPU check.

#include <immintrin.h>

#include "whistle/kernels.hpp"
#include "whistle/philox.hpp"

namespace whistle::kernels {

namespace {

// Four Philox4x32 instances, one per 64-bit lane; each lane holds a 32-bit
// value in its low half.
struct PhiloxX4 {
    __m256i c0, c1, c2, c3;
};

inline PhiloxX4 philox_x4(PhiloxX4 s, __m256i k0, __m256i k1) {
    const __m256i m0 = _mm256_set1_epi64x(rng::kPhiloxM0);
    const __m256i m1 = _mm256_set1_epi64x(rng::kPhiloxM1);
    const __m256i w0 = _mm256_set1_epi64x(rng::kPhiloxW0);
    const __m256i w1 = _mm256_set1_epi64x(rng::kPhiloxW1);
    const __m256i lo32 = _mm256_set1_epi64x(0xFFFFFFFFll);
    for (int round = 0; round < rng::kPhiloxRounds; ++round) {
        const __m256i p0 = _mm256_mul_epu32(s.c0, m0);
        const __m256i p1 = _mm256_mul_epu32(s.c2, m1);
        const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), s.c1), k0);
        const __m256i n1 = _mm256_and_si256(p1, lo32);
        const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), s.c3), k1);
        const __m256i n3 = _mm256_and_si256(p0, lo32);
        s = {n0, n1, n2, n3};
        k0 = _mm256_and_si256(_mm256_add_epi64(k0, w0), lo32);
        k1 = _mm256_and_si256(_mm256_add_epi64(k1, w1), lo32);
    }
    return s;
}

inline __m256i contribution(__m256i x, const std::uint64_t* t_ic, const std::uint64_t* t_inc,
                            const std::int64_t* sign) {
    const __m256i tic = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(t_ic));
    const __m256i tinc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(t_inc));
    const __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(sign));
    // Masks are -1 where true. v = [x < t_inc] - 2 [x < t_ic].
    const __m256i is_ic = _mm256_cmpgt_epi64(tic, x);
    const __m256i below_inc = _mm256_cmpgt_epi64(tinc, x);
    const __m256i v = _mm256_sub_epi64(_mm256_add_epi64(is_ic, is_ic), below_inc);
    return _mm256_sub_epi64(_mm256_xor_si256(v, s), s);
}

}  // namespace

std::int64_t whistle_gain_avx2(const CompiledLedger& ledger, std::uint64_t seed, std::uint32_t replicate) noexcept {
    const auto key = rng::key_from_seed(seed);
    const __m256i k0 = _mm256_set1_epi64x(key[0]);
    const __m256i k1 = _mm256_set1_epi64x(key[1]);
    const __m256i rep = _mm256_set1_epi64x(replicate);
    const __m256i stream = _mm256_set1_epi64x(static_cast<std::uint32_t>(rng::Stream::WhistleGain));
    const __m256i lane = _mm256_set_epi64x(3, 2, 1, 0);
    const __m256i lo32 = _mm256_set1_epi64x(0xFFFFFFFFll);

    const std::uint64_t* t_ic = ledger.tiled_t_ic();
    const std::uint64_t* t_inc = ledger.tiled_t_inc();
    const std::int64_t* sign = ledger.tiled_sign_mask();

    __m256i acc = _mm256_setzero_si256();
    for (std::size_t g = 0; g < ledger.tiles(); ++g) {
        const __m256i block = _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(4 * g)), lane);
        const PhiloxX4 out = philox_x4({_mm256_and_si256(block, lo32), _mm256_srli_epi64(block, 32), rep, stream}, k0, k1);
        const std::size_t base = g * CompiledLedger::kTile;
        acc = _mm256_add_epi64(acc, contribution(out.c0, t_ic + base, t_inc + base, sign + base));
        acc = _mm256_add_epi64(acc, contribution(out.c1, t_ic + base + 4, t_inc + base + 4, sign + base + 4));
        acc = _mm256_add_epi64(acc, contribution(out.c2, t_ic + base + 8, t_inc + base + 8, sign + base + 8));
        acc = _mm256_add_epi64(acc, contribution(out.c3, t_ic + base + 12, t_inc + base + 12, sign + base + 12));
    }
    alignas(32) std::int64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

}  // namespace whistle::kernels
