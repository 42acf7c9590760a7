#pragma once

// Synthetic L2M-style ledgers (and technical-foul datasets) drawn from the
// same null model the detectors assume, optionally with injected bias.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "whistle/analyses.hpp"
#include "whistle/race_audit.hpp"
#include "whistle/rates.hpp"
#include "whistle/types.hpp"

namespace whistle {

struct EventsPerGame {
    double mean = 16.0;
    /// 0: every game has round(mean) events. > 0: negative binomial with
    /// variance mean + dispersion * mean^2.
    double dispersion = 0.0;
};

struct SynthSpec {
    std::size_t n_games = 1200;
    EventsPerGame events_per_game;
    std::map<std::string, double, std::less<>> violation_mix;  // type -> probability, sums to 1
    std::map<std::string, Boundaries, std::less<>> base_rates;  // type -> (b_ic, b_inc)
    /// Entity -> bias b. Keys: "home", "player:<key>", "team:<key>". A positive b
    /// moves probability b from the entity's detrimental outcome to its
    /// beneficial one (IC->INC when it commits, INC->IC when disadvantaged).
    std::map<std::string, double, std::less<>> injected_bias;
    std::uint64_t seed = 0;
    int season = 2019;
    SeasonType season_type = SeasonType::Regular;
    std::size_t n_teams = 30;
    std::size_t players_per_team = 12;

    /// Throws ArgumentError when the mix does not sum to 1 (+-1e-9), a mixed
    /// type has no base rates, or a bias cannot be applied without leaving [0, 1].
    void validate() const;
};

/// Mix and rates used by the calibration and power tooling. Incorrect-call
/// shares are kept at or above 6% so home biases up to 0.06 stay feasible.
SynthSpec default_synth_spec();

struct SynthDataset {
    std::vector<GradedEvent> events;
    std::map<std::string, double, std::less<>> ground_truth;  // the injected biases
};

SynthDataset generate(const SynthSpec& spec);

struct PowerPoint {
    double bias = 0.0;
    std::size_t trials = 0;
    std::size_t detections = 0;
    double rate() const noexcept { return trials == 0 ? 0.0 : double(detections) / double(trials); }
};

struct PowerOptions {
    std::size_t trials = 200;
    double alpha = 0.05;
    std::uint32_t replicates = 999;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

/// Detection rate of the home study (p_upper <= alpha) per bias level. Each
/// trial's dataset is serialized to the canonical CSV and re-ingested.
std::vector<PowerPoint> power_curve(const SynthSpec& spec_template, const std::vector<double>& bias_levels,
                                    const PowerOptions& options);

/// Home-study p_upper of one trial; shared by power_curve and calibration.
double home_trial_p_value(const SynthSpec& spec, std::uint32_t replicates, std::uint64_t sim_seed);

struct RaceSynthSpec {
    std::size_t n_games = 400;
    std::size_t n_referees = 60;
    std::size_t n_teams = 30;
    std::size_t players_per_team = 12;
    double referee_black_share = 0.35;
    double player_black_share = 0.75;
    double player_other_share = 0.05;
    double min_tech_rate = 0.05;  // per referee-game, drawn uniformly per referee
    double max_tech_rate = 0.35;
    std::uint64_t seed = 0;
};

struct RaceSynthDataset {
    std::vector<OfficialAssignment> officials;
    std::vector<BoxScoreLine> box_scores;
    std::vector<PersonDemographics> demographics;
    std::vector<TechFoulEvent> tech_fouls;
};

/// Technical fouls drawn from the race-neutral two-step null.
RaceSynthDataset generate_race_null(const RaceSynthSpec& spec);

}  // namespace whistle
