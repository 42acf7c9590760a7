#include <random>

#include "doctest.h"
#include "whistle/kernels.hpp"
#include "whistle/mc_engine.hpp"
#include "whistle/philox.hpp"

using namespace whistle;
using kernels::CompiledLedger;
using kernels::EventSpec;

namespace {

// Published Philox4x32-10 known-answer vectors.
struct Kat {
    rng::Counter ctr;
    rng::Key key;
    rng::Counter expect;
};
constexpr Kat kKats[] = {
    {{0, 0, 0, 0}, {0, 0}, {0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}},
    {{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
     {0xffffffff, 0xffffffff},
     {0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}},
    {{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
     {0xa4093822, 0x299f31d0},
     {0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}},
};

static_assert(rng::philox4x32(kKats[0].ctr, kKats[0].key) == kKats[0].expect);

std::vector<EventSpec> random_specs(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<EventSpec> out;
    for (std::size_t i = 0; i < n; ++i) {
        double a = u(gen);
        double b = u(gen);
        switch (gen() % 6) {
            case 0: a = 0.0; break;
            case 1: b = 1.0; break;
            case 2: a = b = 0.0; break;
            case 3: a = double(gen() % 16) / 16.0; b = a; break;  // exact dyadic edges
            default: break;
        }
        if (a > b) std::swap(a, b);
        out.push_back({a, b, gen() % 2 ? 1 : -1});
    }
    return out;
}

// Reference built from doubles and simulate_event, not from thresholds.
std::int64_t reference_gain(std::span<const EventSpec> specs, std::uint64_t seed, std::uint32_t replicate) {
    std::int64_t gain = 0;
    for (std::size_t e = 0; e < specs.size(); ++e) {
        const auto words = rng::philox4x32({std::uint32_t(e / 4), 0, replicate, 1}, rng::key_from_seed(seed));
        ViolationRates r;
        r.boundaries = Boundaries{specs[e].b_ic, specs[e].b_inc};
        const Decision d = simulate_event(r, rng::to_unit(words[e % 4]));
        const int v = d == Decision::IncorrectNonCall ? 1 : d == Decision::IncorrectCall ? -1 : 0;
        gain += specs[e].sign * v;
    }
    return gain;
}

}  // namespace

TEST_CASE("Philox4x32-10 known answers") {
    for (const auto& k : kKats) CHECK(rng::philox4x32(k.ctr, k.key) == k.expect);
}

TEST_CASE("engine streams are reproducible and distinct") {
    rng::PhiloxEngine a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    bool differs_stream = false;
    bool differs_seed = false;
    for (int i = 0; i < 64; ++i) {
        const auto x = a();
        CHECK(x == b());
        differs_stream |= x != c();
        differs_seed |= x != d();
    }
    CHECK(differs_stream);
    CHECK(differs_seed);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(rng::derive_seed(1, "player:a") != rng::derive_seed(1, "player:b"));
    CHECK(rng::derive_seed(1, "x") == rng::derive_seed(1, "x"));
}

TEST_CASE("thresholds") {
    CHECK(kernels::threshold(0.0) == 0);
    CHECK(kernels::threshold(-0.5) == 0);
    CHECK(kernels::threshold(1.0) == (std::uint64_t(1) << 32));
    CHECK(kernels::threshold(0.5) == (std::uint64_t(1) << 31));
    CHECK(kernels::threshold(0x1.0p-32) == 1);
    CHECK(kernels::threshold(0x1.8p-32) == 2);
    // x / 2^32 < b  <=>  x < threshold(b)
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double b = u(gen);
        const std::uint64_t t = kernels::threshold(b);
        REQUIRE(t > 0);
        CHECK(rng::to_unit(std::uint32_t(t - 1)) < b);
        if (t < (std::uint64_t(1) << 32)) CHECK_FALSE(rng::to_unit(std::uint32_t(t)) < b);
    }
}

TEST_CASE("tiled layout holds every event once") {
    std::mt19937_64 gen(1);
    for (std::size_t n : {0u, 1u, 15u, 16u, 17u, 33u}) {
        const auto specs = random_specs(gen, n);
        const CompiledLedger ledger(specs);
        CHECK(ledger.size() == n);
        CHECK(ledger.tiles() == (n + 15) / 16);
        for (std::size_t e = 0; e < n; ++e) {
            const std::size_t slot = e / 16 * 16 + 4 * (e % 4) + (e % 16) / 4;
            CHECK(ledger.tiled_t_ic()[slot] == ledger.t_ic()[e]);
            CHECK(ledger.tiled_t_inc()[slot] == ledger.t_inc()[e]);
            CHECK(ledger.tiled_sign_mask()[slot] == ledger.sign_mask()[e]);
        }
    }
}

TEST_CASE("scalar kernel agrees with the double-precision reference") {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto specs = random_specs(gen, gen() % 40);
        const CompiledLedger ledger(specs);
        const std::uint64_t seed = gen();
        const auto rep = std::uint32_t(gen());
        CHECK(kernels::whistle_gain_scalar(ledger, seed, rep) == reference_gain(specs, seed, rep));
    }
}

TEST_CASE("AVX2 kernel is bit-identical to scalar") {
    if (!kernels::isa_available(kernels::Isa::Avx2)) {
        MESSAGE("AVX2 unavailable; vector kernel not exercised");
        return;
    }
    std::mt19937_64 gen(123);
    for (int trial = 0; trial < 500; ++trial) {
        const auto specs = random_specs(gen, gen() % 100);
        const CompiledLedger ledger(specs);
        const std::uint64_t seed = gen();
        const auto rep = std::uint32_t(gen());
        CHECK(kernels::whistle_gain_avx2(ledger, seed, rep) == kernels::whistle_gain_scalar(ledger, seed, rep));
    }

    const auto specs = random_specs(gen, 1000);
    const CompiledLedger ledger(specs);
    std::vector<std::int64_t> a(257), b(257);
    kernels::whistle_gain_batch(ledger, 5, 100, a, kernels::Isa::Scalar);
    kernels::whistle_gain_batch(ledger, 5, 100, b, kernels::Isa::Avx2);
    CHECK(a == b);
}
