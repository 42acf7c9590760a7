#pragma once

// Same-race vs different-race technical-foul rates per 48 player-minutes and
// a two-step simulated null for their difference.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "whistle/types.hpp"

namespace whistle {

struct RosterEntry {
    std::string player;
    double minutes = 0.0;
    Race race = Race::Unknown;
};

struct RefGameExposure {
    std::string referee;
    std::string game_id;
    Race referee_race = Race::Unknown;
    double same_race_minutes = 0.0;
    double diff_race_minutes = 0.0;
    std::vector<RosterEntry> roster;  // every player with positive minutes
};

struct ExposureSet {
    std::vector<RefGameExposure> exposures;  // ordered by (game, referee)
    std::size_t total_games = 0;
    std::vector<std::string> dropped_games;  // a referee lacks white/black demographics

    double dropped_fraction() const noexcept {
        return total_games == 0 ? 0.0 : double(dropped_games.size()) / double(total_games);
    }
};

/// One exposure per (referee, retained game). Throws DataGapError listing
/// every retained game that has no box score.
ExposureSet build_exposures(std::span<const OfficialAssignment> officials, std::span<const BoxScoreLine> box_scores,
                            std::span<const PersonDemographics> demographics);

/// Fouls per 48 player-minutes; undefined when there is no exposure.
std::optional<double> per48(std::int64_t fouls, double minutes);

struct TechRateSummary {
    std::optional<double> tau_same;
    std::optional<double> tau_diff;
    std::optional<double> delta_tau;  // tau_diff - tau_same
    std::int64_t same_fouls = 0;
    std::int64_t diff_fouls = 0;
    double same_minutes = 0.0;
    double diff_minutes = 0.0;
    std::size_t n_fouls_used = 0;
    std::size_t n_fouls_excluded = 0;  // outside retained games or non white/black players
};

/// Throws SimulationError when a bucket has fouls but no exposure.
TechRateSummary tech_rates(std::span<const RefGameExposure> exposures, std::span<const TechFoulEvent> fouls,
                           std::span<const PersonDemographics> demographics);

/// Career technical-foul calls per retained game for each referee. Every foul
/// by the referee in a retained game counts, whatever the recipient's race.
std::map<std::string, double, std::less<>> per_referee_rates(std::span<const RefGameExposure> exposures,
                                                             std::span<const TechFoulEvent> fouls);

enum class TechCallModel : std::uint8_t {
    Bernoulli,  // at most one simulated technical per referee-game, p = min(rate, 1)
    Poisson,    // Poisson(rate) simulated technicals per referee-game
};

struct RaceNullConfig {
    std::uint32_t replicates = 10'000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    TechCallModel model = TechCallModel::Bernoulli;
};

struct RaceNullResult {
    bool degenerate = false;
    std::string diagnostic;  // set when degenerate
    double observed_delta = 0.0;
    std::vector<double> null_samples;
    double null_mean = 0.0;
    double p_value = 1.0;  // add-one, fraction of null delta >= observed
};

/// Simulates technical fouls under "no racial preference": each referee-game
/// draws whether a technical is called from the referee's rate, and the
/// recipient with probability proportional to minutes played.
RaceNullResult simulate_race_null(std::span<const RefGameExposure> exposures,
                                  const std::map<std::string, double, std::less<>>& referee_rates,
                                  double observed_delta, const RaceNullConfig& config);

/// Recipient index for a uniform draw u in [0, 1) given cumulative minutes.
std::size_t pick_recipient(std::span<const double> cumulative_minutes, double u);

struct Histogram {
    std::vector<double> edges;  // bins + 1 edges
    std::vector<std::size_t> counts;
};

Histogram make_histogram(std::span<const double> samples, std::size_t bins);

}  // namespace whistle
