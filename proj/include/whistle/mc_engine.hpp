#pragma once

// Null-model simulation of graded events and the net whistle gain statistic.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "whistle/kernels.hpp"
#include "whistle/rates.hpp"
#include "whistle/types.hpp"

namespace whistle {

enum class Role : std::uint8_t { Committing, Disadvantaged };

struct LedgerEvent {
    std::string violation_type;
    Role role = Role::Committing;
    Decision decision = Decision::CorrectCall;
};

/// Graded events seen from one entity's point of view.
///
/// Benefit (beta) counts incorrect non-calls on violations the entity
/// committed plus incorrect calls made against its opponent; detriment (delta)
/// is the mirror image.
struct EntityLedger {
    std::string entity;
    std::vector<LedgerEvent> events;
    std::int64_t observed_beta = 0;
    std::int64_t observed_delta = 0;

    /// Appends an event and updates beta/delta. CNC events are ignored.
    void add(std::string violation_type, Role role, Decision decision);
    std::size_t size() const noexcept { return events.size(); }
};

std::int64_t observed_whistle_gain(const EntityLedger& ledger) noexcept;

/// Copy of the ledger with every role swapped.
EntityLedger swap_roles(const EntityLedger& ledger);

/// Resolves rates for a violation type; nullptr when none are known.
using RateLookup = std::function<const ViolationRates*(std::string_view)>;

RateLookup lookup_in(const RateTable& table);
RateLookup lookup_in(const LeaveOneOutRates& rates);

struct SimConfig {
    std::uint32_t replicates = 10'000;
    std::uint64_t master_seed = 0;
    /// Bayesian-average pseudo-count; unset means raw rates.
    std::optional<double> smoothing;
    /// Worker threads (0 = hardware concurrency). Never changes results.
    unsigned threads = 0;
    kernels::Isa isa = kernels::preferred_isa();
};

struct SimOutcome {
    std::size_t n_events = 0;
    std::int64_t observed_wg = 0;
    double null_mean = 0.0;
    std::vector<std::int64_t> null_samples;
    double p_upper = 1.0;
    double p_lower = 1.0;
    double excess = 0.0;
    double share_gap_pct = 0.0;
};

/// Outcome for one event given its type's boundaries and a uniform draw in
/// [0, 1): [0, b_ic) incorrect call, [b_ic, b_inc) incorrect non-call, else
/// correct call. Throws SimulationError when boundaries are undefined.
Decision simulate_event(const ViolationRates& rates, double u);

enum class Tail : std::uint8_t { Upper, Lower };

/// Add-one estimator: (1 + #{sample at or beyond observed}) / (R + 1).
double empirical_p_value(std::span<const std::int64_t> null_samples, std::int64_t observed, Tail tail);
double empirical_p_value(std::span<const double> null_samples, double observed, Tail tail);

/// Home-vs-visitor share gap in percentage points: 2 * excess / N * 100.
double share_gap_pct(double excess, std::size_t n_events) noexcept;

/// Compiles per-event thresholds for the kernels. Throws SimulationError
/// naming the first violation type without usable boundaries.
kernels::CompiledLedger compile_ledger(const EntityLedger& ledger, const RateLookup& rates);

/// Resamples every event of the ledger R times (roles fixed) and summarizes
/// the null distribution. Results depend only on (ledger, rates, seed, R).
SimOutcome run_simulation(const EntityLedger& ledger, const RateLookup& rates, const SimConfig& config);

/// Summary statistics from raw null samples.
SimOutcome summarize(std::int64_t observed, std::size_t n_events, std::vector<std::int64_t> null_samples);

}  // namespace whistle
