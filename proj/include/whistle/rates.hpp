#pragma once

// Per-violation-type call accuracy: precision, recall, and the cumulative
// decision boundaries used to resample event outcomes.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "whistle/types.hpp"

namespace whistle {

struct ViolationCounts {
    std::string violation_type;
    std::int64_t cc = 0;
    std::int64_t ic = 0;
    std::int64_t inc = 0;

    std::int64_t total() const noexcept { return cc + ic + inc; }
    void add(Decision d);
    ViolationCounts& operator+=(const ViolationCounts& other);

    friend bool operator==(const ViolationCounts&, const ViolationCounts&) = default;
};

/// Partition of [0,1): [0, ic) incorrect call, [ic, inc) incorrect non-call,
/// [inc, 1) correct call.
struct Boundaries {
    double ic = 0.0;
    double inc = 0.0;

    friend bool operator==(const Boundaries&, const Boundaries&) = default;
};

struct ViolationRates {
    std::string violation_type;
    ViolationCounts counts;
    std::optional<double> precision;  // undefined when cc + ic == 0
    std::optional<double> recall;     // undefined when cc + inc == 0
    std::optional<Boundaries> boundaries;  // undefined when total == 0

    friend bool operator==(const ViolationRates&, const ViolationRates&) = default;
};

using RateTable = std::map<std::string, ViolationRates, std::less<>>;
using CountTable = std::map<std::string, ViolationCounts, std::less<>>;

/// Tallies non-CNC events per violation type.
CountTable count_decisions(std::span<const GradedEvent> events);

ViolationRates rates_from_counts(const ViolationCounts& counts);

RateTable compute_rates(std::span<const GradedEvent> events);

/// Sum of counts over all types (violation_type left empty).
ViolationCounts aggregate(const CountTable& counts);

enum class EntityKind : std::uint8_t { HomeSide, Player, Team };

std::string_view to_string(EntityKind k);

/// True when the entity appears as committing or disadvantaged party.
bool involves(const GradedEvent& e, std::string_view entity, EntityKind kind);

struct LeaveOneOutRates {
    RateTable rates;              // computed without the excluded entity
    RateTable fallback;           // global rates for types emptied by the exclusion
    std::set<std::string, std::less<>> fallback_types;

    /// Own rate when available, else the global fallback, else nullptr.
    const ViolationRates* find(std::string_view violation_type) const;
};

LeaveOneOutRates leave_one_out_rates(std::span<const GradedEvent> events, std::string_view excluded_entity,
                                     EntityKind kind);

/// Bayesian-average rates: every numerator and denominator is augmented by
/// `pseudo_count` times the matching proportion of `prior`. A pseudo-count of
/// zero reproduces rates_from_counts exactly. Throws ArgumentError for a
/// negative or non-finite pseudo-count, or a positive one with an empty prior.
ViolationRates smoothed_rates(const ViolationCounts& counts, const ViolationCounts& prior, double pseudo_count);

/// Applies smoothed_rates to every entry, with the table's own aggregate as prior.
RateTable smooth_table(const RateTable& table, double pseudo_count);

inline constexpr double kDefaultPseudoCount = 20.0;

}  // namespace whistle
