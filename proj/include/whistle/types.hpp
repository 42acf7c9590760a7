#pragma once

// Canonical data model shared by every stage of the pipeline.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace whistle {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mapping/alias document is malformed or references a missing column.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input held no usable data rows.
class NoDataError : public Error {
public:
    using Error::Error;
};

/// Required companion data is missing for some records (e.g. a retained game
/// without a box score). `items` lists the offending keys.
class DataGapError : public Error {
public:
    DataGapError(const std::string& what, std::vector<std::string> items)
        : Error(what), items_(std::move(items)) {}
    const std::vector<std::string>& items() const noexcept { return items_; }

private:
    std::vector<std::string> items_;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class SimulationError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Enumerations
// ---------------------------------------------------------------------------

enum class Decision : std::uint8_t { CorrectCall, IncorrectCall, IncorrectNonCall, CorrectNonCall };
enum class Side : std::uint8_t { Home, Visiting, Unknown };
enum class SeasonType : std::uint8_t { Regular, Playoffs };
enum class SeasonTypeFilter : std::uint8_t { Regular, Playoffs, Both };
enum class Race : std::uint8_t { White, Black, Other, Unknown };
enum class PersonRole : std::uint8_t { Player, Referee };

/// Strict parse of a grade code ("CC", "IC", "INC", "CNC"; case-insensitive).
std::optional<Decision> parse_decision(std::string_view text);
std::string_view to_string(Decision d);

std::optional<Side> parse_side(std::string_view text);
std::string_view to_string(Side s);
Side opposite(Side s);

std::optional<SeasonType> parse_season_type(std::string_view text);
std::string_view to_string(SeasonType t);

std::optional<SeasonTypeFilter> parse_season_type_filter(std::string_view text);
std::string_view to_string(SeasonTypeFilter t);
bool matches(SeasonTypeFilter filter, SeasonType t);

std::optional<Race> parse_race(std::string_view text);
std::string_view to_string(Race r);

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct GradedEvent {
    std::string game_id;
    int season = 0;
    SeasonType season_type = SeasonType::Regular;
    std::string violation_type;
    Decision decision = Decision::CorrectCall;
    Side committing_side = Side::Unknown;
    Side disadvantaged_side = Side::Unknown;
    std::optional<std::string> committing_player;
    std::optional<std::string> disadvantaged_player;
    std::optional<std::string> committing_team;
    std::optional<std::string> disadvantaged_team;

    bool is_cnc() const noexcept { return decision == Decision::CorrectNonCall; }

    friend bool operator==(const GradedEvent&, const GradedEvent&) = default;
};

struct TechFoulEvent {
    std::string game_id;
    std::string referee;
    std::string player;
    std::optional<std::string> game_clock_context;

    friend bool operator==(const TechFoulEvent&, const TechFoulEvent&) = default;
};

struct PersonDemographics {
    std::string person;
    PersonRole role = PersonRole::Player;
    Race race = Race::Unknown;
};

struct BoxScoreLine {
    std::string game_id;
    std::string player;
    double minutes_played = 0.0;
};

struct OfficialAssignment {
    std::string game_id;
    std::string referee;
};

struct SeasonRange {
    int first = 2015;
    int last = 2022;
    bool contains(int season) const noexcept { return season >= first && season <= last; }
};

/// Parses "2015-2022" or a single year "2019".
SeasonRange parse_season_range(std::string_view text);

}  // namespace whistle
