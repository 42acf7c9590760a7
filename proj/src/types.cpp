#include "whistle/types.hpp"

#include <charconv>

#include "whistle/text.hpp"

namespace whistle {

std::optional<Decision> parse_decision(std::string_view t) {
    t = text::trim(t);
    if (text::iequals(t, "CC")) return Decision::CorrectCall;
    if (text::iequals(t, "IC")) return Decision::IncorrectCall;
    if (text::iequals(t, "INC")) return Decision::IncorrectNonCall;
    if (text::iequals(t, "CNC")) return Decision::CorrectNonCall;
    return std::nullopt;
}

std::string_view to_string(Decision d) {
    switch (d) {
        case Decision::CorrectCall: return "CC";
        case Decision::IncorrectCall: return "IC";
        case Decision::IncorrectNonCall: return "INC";
        case Decision::CorrectNonCall: return "CNC";
    }
    return "?";
}

std::optional<Side> parse_side(std::string_view t) {
    t = text::trim(t);
    if (text::iequals(t, "home")) return Side::Home;
    if (text::iequals(t, "visiting")) return Side::Visiting;
    if (text::iequals(t, "unknown") || t.empty()) return Side::Unknown;
    return std::nullopt;
}

std::string_view to_string(Side s) {
    switch (s) {
        case Side::Home: return "home";
        case Side::Visiting: return "visiting";
        case Side::Unknown: return "unknown";
    }
    return "?";
}

Side opposite(Side s) {
    switch (s) {
        case Side::Home: return Side::Visiting;
        case Side::Visiting: return Side::Home;
        case Side::Unknown: return Side::Unknown;
    }
    return Side::Unknown;
}

std::optional<SeasonType> parse_season_type(std::string_view t) {
    t = text::trim(t);
    if (text::iequals(t, "regular")) return SeasonType::Regular;
    if (text::iequals(t, "playoffs")) return SeasonType::Playoffs;
    return std::nullopt;
}

std::string_view to_string(SeasonType t) { return t == SeasonType::Regular ? "regular" : "playoffs"; }

std::optional<SeasonTypeFilter> parse_season_type_filter(std::string_view t) {
    t = text::trim(t);
    if (text::iequals(t, "regular")) return SeasonTypeFilter::Regular;
    if (text::iequals(t, "playoffs")) return SeasonTypeFilter::Playoffs;
    if (text::iequals(t, "both")) return SeasonTypeFilter::Both;
    return std::nullopt;
}

std::string_view to_string(SeasonTypeFilter t) {
    switch (t) {
        case SeasonTypeFilter::Regular: return "regular";
        case SeasonTypeFilter::Playoffs: return "playoffs";
        case SeasonTypeFilter::Both: return "both";
    }
    return "?";
}

bool matches(SeasonTypeFilter filter, SeasonType t) {
    switch (filter) {
        case SeasonTypeFilter::Regular: return t == SeasonType::Regular;
        case SeasonTypeFilter::Playoffs: return t == SeasonType::Playoffs;
        case SeasonTypeFilter::Both: return true;
    }
    return false;
}

std::optional<Race> parse_race(std::string_view t) {
    t = text::trim(t);
    if (text::iequals(t, "white")) return Race::White;
    if (text::iequals(t, "black")) return Race::Black;
    if (text::iequals(t, "other")) return Race::Other;
    if (text::iequals(t, "unknown") || t.empty()) return Race::Unknown;
    return std::nullopt;
}

std::string_view to_string(Race r) {
    switch (r) {
        case Race::White: return "white";
        case Race::Black: return "black";
        case Race::Other: return "other";
        case Race::Unknown: return "unknown";
    }
    return "?";
}

namespace {
int parse_year(std::string_view s) {
    s = text::trim(s);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ArgumentError("invalid season year: '" + std::string(s) + "'");
    }
    return v;
}
}  // namespace

SeasonRange parse_season_range(std::string_view text) {
    const auto dash = text.find('-');
    SeasonRange r;
    if (dash == std::string_view::npos) {
        r.first = r.last = parse_year(text);
    } else {
        r.first = parse_year(text.substr(0, dash));
        r.last = parse_year(text.substr(dash + 1));
    }
    if (r.first > r.last) throw ArgumentError("empty season range: " + std::string(text));
    return r;
}

}  // namespace whistle
