#pragma once

// Inner loop of the whistle-gain null model: resample every ledger event for
// one replicate and sum its signed contribution.
//
// Each event e of replicate r draws the 32-bit word (e % 4) of
// Philox4x32(counter = {e / 4, 0, r, Stream::WhistleGain}, key = seed).
// Outcome boundaries are stored as integer thresholds t = ceil(b * 2^32), so
// "u < b" with u = x / 2^32 is exactly "x < t" and every ISA variant returns
// bit-identical results.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace whistle::kernels {

/// ceil(b * 2^32) for b in [0, 1]; 2^32 for b == 1.
std::uint64_t threshold(double boundary);

struct EventSpec {
    double b_ic = 0.0;
    double b_inc = 0.0;
    /// +1: entity committed the violation, -1: entity was disadvantaged.
    int sign = 1;
};

/// Event thresholds in two layouts: natural order for the scalar reference and
/// 16-event interleaved tiles (padded with inert events) for vector kernels.
class CompiledLedger {
public:
    CompiledLedger() = default;
    explicit CompiledLedger(std::span<const EventSpec> events);

    std::size_t size() const noexcept { return t_ic_.size(); }

    // Natural order.
    std::span<const std::uint64_t> t_ic() const noexcept { return t_ic_; }
    std::span<const std::uint64_t> t_inc() const noexcept { return t_inc_; }
    std::span<const std::int64_t> sign_mask() const noexcept { return sign_mask_; }

    // Tiled: tile g holds events 16g + 4k + w at index 16g + 4w + k.
    static constexpr std::size_t kTile = 16;
    std::size_t tiles() const noexcept { return tiled_t_ic_.size() / kTile; }
    const std::uint64_t* tiled_t_ic() const noexcept { return tiled_t_ic_.data(); }
    const std::uint64_t* tiled_t_inc() const noexcept { return tiled_t_inc_.data(); }
    const std::int64_t* tiled_sign_mask() const noexcept { return tiled_sign_mask_.data(); }

private:
    std::vector<std::uint64_t> t_ic_;
    std::vector<std::uint64_t> t_inc_;
    std::vector<std::int64_t> sign_mask_;  // 0 for +1, -1 for -1
    std::vector<std::uint64_t> tiled_t_ic_;
    std::vector<std::uint64_t> tiled_t_inc_;
    std::vector<std::int64_t> tiled_sign_mask_;
};

enum class Isa : std::uint8_t { Scalar, Avx2 };

std::string_view to_string(Isa isa);
bool isa_available(Isa isa) noexcept;

/// Widest ISA the CPU supports, unless WHISTLE_ISA=scalar forces the reference.
Isa preferred_isa() noexcept;

std::int64_t whistle_gain_scalar(const CompiledLedger& ledger, std::uint64_t seed, std::uint32_t replicate) noexcept;
std::int64_t whistle_gain_avx2(const CompiledLedger& ledger, std::uint64_t seed, std::uint32_t replicate) noexcept;

/// out[i] = whistle gain of replicate first_replicate + i.
void whistle_gain_batch(const CompiledLedger& ledger, std::uint64_t seed, std::uint32_t first_replicate,
                        std::span<std::int64_t> out, Isa isa);

}  // namespace whistle::kernels
