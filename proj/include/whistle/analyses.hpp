#pragma once

// Home-court, player and team whistle-gain studies plus the binomial
// multiple-testing meta-test.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "whistle/mc_engine.hpp"
#include "whistle/rates.hpp"
#include "whistle/types.hpp"

namespace whistle {

struct StudySpec {
    EntityKind kind = EntityKind::HomeSide;
    SeasonRange seasons{2015, 2022};
    SeasonTypeFilter season_type = SeasonTypeFilter::Both;
    /// Minimum non-CNC involvements (committing or disadvantaged); players only.
    std::int64_t min_involvements = 100;
    double alpha = 0.05;

    /// Throws ArgumentError for an empty season range or alpha outside (0, 1).
    void validate() const;
};

/// Non-CNC events inside the study's seasons and season type.
std::vector<GradedEvent> select_events(std::span<const GradedEvent> events, const StudySpec& spec);

/// Role of an entity in an event, if it took part.
std::optional<Role> role_of(const GradedEvent& e, EntityKind kind, std::string_view entity);

/// One ledger for the home side, or one per qualifying player/team, ordered
/// by entity key.
std::vector<EntityLedger> build_ledgers(std::span<const GradedEvent> events, const StudySpec& spec);

struct EntityResult {
    std::string entity;
    SimOutcome outcome;
    std::vector<std::string> fallback_types;  // leave-one-out types that fell back to global rates
};

/// Runs one simulation per ledger. Player and team studies resample with
/// leave-one-out rates. Each entity's seed is derived from the master seed and
/// the entity key, so results do not depend on which other entities qualify.
/// Results are sorted by p_upper ascending, then entity key.
std::vector<EntityResult> run_study(std::span<const GradedEvent> events, const StudySpec& spec,
                                    const SimConfig& config);

struct MetaTestResult {
    std::size_t m_tests = 0;
    std::size_t r_significant = 0;
    double alpha = 0.05;
    double p_all_false_positive = 1.0;
};

/// P(X >= r) for X ~ Binomial(m, alpha), summed in the log domain.
double binomial_meta_test(std::size_t m, std::size_t r, double alpha);

struct SignificanceSummary {
    std::vector<std::string> positive;  // p_upper <= alpha
    std::vector<std::string> negative;  // p_lower <= alpha
    MetaTestResult positive_meta;
    MetaTestResult negative_meta;
};

SignificanceSummary classify_significance(std::span<const EntityResult> results, double alpha);

/// "positive", "negative" or "none" for one outcome at level alpha.
std::string_view significant_direction(const SimOutcome& outcome, double alpha);

}  // namespace whistle
