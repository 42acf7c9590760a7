#include "whistle/ingest.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "whistle/csv.hpp"
#include "whistle/text.hpp"

namespace whistle {

namespace {

// Resolved column indices for one table.
class Binder {
public:
    Binder(const csv::Table& table, const ColumnMapping& mapping, std::initializer_list<std::string_view> required,
           std::initializer_list<std::string_view> optional) {
        for (auto name : required) {
            auto source = mapping.column(name);
            if (!source) throw ConfigError("mapping does not bind required field '" + std::string(name) + "'");
            bind(table, name, *source);
        }
        // Optional fields absent from the header stay unbound.
        for (auto name : optional) {
            auto source = mapping.column(name);
            if (source && table.column(*source)) bind(table, name, *source);
        }
    }

    bool bound(std::string_view name) const { return index_.find(name) != index_.end(); }

    std::string_view get(const csv::Record& rec, std::string_view name) const {
        auto it = index_.find(name);
        if (it == index_.end() || it->second >= rec.fields.size()) return {};
        return text::trim(rec.fields[it->second]);
    }

private:
    void bind(const csv::Table& table, std::string_view name, const std::string& source) {
        auto idx = table.column(source);
        if (!idx) {
            throw ConfigError("mapped column '" + source + "' (for field '" + std::string(name) +
                              "') not found in source header");
        }
        index_.emplace(std::string(name), *idx);
    }

    std::map<std::string, std::size_t, std::less<>> index_;
};

csv::Table load_table(std::string_view source, const ColumnMapping& mapping) {
    csv::Table table = csv::parse(source, mapping.delimiter);
    if (table.header.empty() || table.rows.empty()) throw NoDataError("no data: source has no data rows");
    return table;
}

bool in_vocab(const std::vector<std::string>& vocab, std::string_view value) {
    for (const auto& v : vocab) {
        if (text::iequals(v, value)) return true;
    }
    return false;
}

std::optional<std::string> person_key(std::string_view raw, const AliasTable& aliases) {
    if (raw.empty()) return std::nullopt;
    auto key = text::normalize_key(raw);
    if (key.empty()) return std::nullopt;
    if (auto alias = aliases.person(key)) return alias;
    return key;
}

std::optional<std::string> team_key(std::string_view raw, const AliasTable& aliases) {
    if (raw.empty()) return std::nullopt;
    auto key = text::normalize_key(raw);
    if (key.empty()) return std::nullopt;
    if (auto alias = aliases.team(key)) return alias;
    return key;
}

int setting_int(const ColumnMapping& m, std::string_view key, int fallback) {
    auto v = m.setting(key);
    if (!v) return fallback;
    int out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) {
        throw ConfigError("setting '" + std::string(key) + "' must be an integer");
    }
    return out;
}

// "2015", or "2014-15" / "2014-2015" (labelled by the year the season ends).
std::optional<int> parse_season_label(std::string_view s) {
    int first = 0;
    auto [p1, e1] = std::from_chars(s.data(), s.data() + s.size(), first);
    if (e1 != std::errc{}) return std::nullopt;
    if (p1 == s.data() + s.size()) return first;
    if (*p1 != '-') return std::nullopt;
    std::string_view rest(p1 + 1, s.data() + s.size() - (p1 + 1));
    int second = 0;
    auto [p2, e2] = std::from_chars(rest.data(), rest.data() + rest.size(), second);
    if (e2 != std::errc{} || p2 != rest.data() + rest.size()) return std::nullopt;
    if (rest.size() == 2) second += (first / 100) * 100 + (second < first % 100 ? 100 : 0);
    if (second != first + 1) return std::nullopt;
    return second;
}

Side map_side(std::string_view raw, const ColumnMapping& m) {
    if (raw.empty()) return Side::Unknown;
    if (in_vocab(m.values("side.home"), raw)) return Side::Home;
    if (in_vocab(m.values("side.visiting"), raw)) return Side::Visiting;
    return Side::Unknown;
}

std::optional<double> parse_minutes(std::string_view s) {
    if (s.empty()) return std::nullopt;
    const auto colon = s.find(':');
    if (colon != std::string_view::npos) {
        int mm = 0;
        int ss = 0;
        auto a = s.substr(0, colon);
        auto b = s.substr(colon + 1);
        auto [pa, ea] = std::from_chars(a.data(), a.data() + a.size(), mm);
        auto [pb, eb] = std::from_chars(b.data(), b.data() + b.size(), ss);
        if (ea != std::errc{} || eb != std::errc{} || pa != a.data() + a.size() || pb != b.data() + b.size() ||
            ss < 0 || ss >= 60) {
            return std::nullopt;
        }
        const double sign = mm < 0 || a.starts_with('-') ? -1.0 : 1.0;
        return sign * (std::abs(mm) + ss / 60.0);
    }
    double v = 0.0;
    auto [p, e] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (e != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

void write_rejection_log(std::ostream& out, const ParseReport& report) {
    for (const auto& r : report.rejections) out << r.row << '\t' << r.reason << '\t' << r.raw << '\n';
}

std::string canonical_violation_label(std::string_view raw) {
    const std::string key = text::normalize_key(raw);
    std::string out;
    out.reserve(key.size());
    for (std::size_t i = 0; i < key.size(); ++i) {
        const char c = key[i];
        if (c == ' ') {
            const bool before_colon = i + 1 < key.size() && key[i + 1] == ':';
            const bool after_colon = !out.empty() && out.back() == ':';
            if (before_colon || after_colon) continue;
        }
        out += c;
    }
    return out;
}

std::string normalize_violation_type(std::string_view raw, const AliasTable& aliases) {
    std::string label = canonical_violation_label(raw);
    if (auto alias = aliases.violation(label)) return *alias;
    return label;
}

L2MParseResult parse_l2m(std::string_view source, const ColumnMapping& mapping, const AliasTable& aliases) {
    const csv::Table table = load_table(source, mapping);
    const Binder cols(table, mapping, {"game_id", "season", "violation_type", "decision"},
                      {"season_type", "committing_side", "disadvantaged_side", "committing_player",
                       "disadvantaged_player", "committing_team", "disadvantaged_team", "home_team", "away_team"});
    const SeasonRange window{setting_int(mapping, "season.first", 2015), setting_int(mapping, "season.last", 2022)};
    const auto playoff_prefix = mapping.setting("season_type.playoff_game_prefix").value_or("004");

    L2MParseResult result;
    result.report.total_rows = table.rows.size();
    auto reject = [&](const csv::Record& rec, std::string reason) {
        result.report.rejections.push_back(Rejection{rec.row_number, std::move(reason), rec.raw});
    };

    for (const auto& rec : table.rows) {
        GradedEvent ev;
        ev.game_id = std::string(cols.get(rec, "game_id"));
        if (ev.game_id.empty()) {
            reject(rec, "missing game_id");
            continue;
        }

        const auto decision = parse_decision(cols.get(rec, "decision"));
        if (!decision) {
            reject(rec, "unknown decision grade '" + std::string(cols.get(rec, "decision")) + "'");
            continue;
        }
        ev.decision = *decision;

        const auto season = parse_season_label(cols.get(rec, "season"));
        if (!season) {
            reject(rec, "unparseable season '" + std::string(cols.get(rec, "season")) + "'");
            continue;
        }
        if (!window.contains(*season)) {
            reject(rec, "season " + std::to_string(*season) + " outside coverage window");
            continue;
        }
        ev.season = *season;

        if (cols.bound("season_type")) {
            const auto raw = cols.get(rec, "season_type");
            if (in_vocab(mapping.values("season_type.playoffs"), raw)) {
                ev.season_type = SeasonType::Playoffs;
            } else if (in_vocab(mapping.values("season_type.regular"), raw)) {
                ev.season_type = SeasonType::Regular;
            } else {
                reject(rec, "unknown season type '" + std::string(raw) + "'");
                continue;
            }
        } else {
            ev.season_type = ev.game_id.starts_with(playoff_prefix) ? SeasonType::Playoffs : SeasonType::Regular;
        }

        const auto violation_raw = cols.get(rec, "violation_type");
        if (violation_raw.empty()) {
            reject(rec, "missing violation type");
            continue;
        }
        ev.violation_type = normalize_violation_type(violation_raw, aliases);

        ev.committing_side = map_side(cols.get(rec, "committing_side"), mapping);
        ev.disadvantaged_side = map_side(cols.get(rec, "disadvantaged_side"), mapping);
        ev.committing_player = person_key(cols.get(rec, "committing_player"), aliases);
        ev.disadvantaged_player = person_key(cols.get(rec, "disadvantaged_player"), aliases);
        ev.committing_team = team_key(cols.get(rec, "committing_team"), aliases);
        ev.disadvantaged_team = team_key(cols.get(rec, "disadvantaged_team"), aliases);

        // With home/away team columns, teams and sides fill each other in.
        const auto home = team_key(cols.get(rec, "home_team"), aliases);
        const auto away = team_key(cols.get(rec, "away_team"), aliases);
        if (home && away) {
            auto side_of = [&](const std::optional<std::string>& team) {
                if (!team) return Side::Unknown;
                if (*team == *home) return Side::Home;
                if (*team == *away) return Side::Visiting;
                return Side::Unknown;
            };
            auto team_of = [&](Side s) -> std::optional<std::string> {
                if (s == Side::Home) return home;
                if (s == Side::Visiting) return away;
                return std::nullopt;
            };
            if (ev.committing_side == Side::Unknown) ev.committing_side = side_of(ev.committing_team);
            if (ev.disadvantaged_side == Side::Unknown) ev.disadvantaged_side = side_of(ev.disadvantaged_team);
            if (!ev.committing_team) ev.committing_team = team_of(ev.committing_side);
            if (!ev.disadvantaged_team) ev.disadvantaged_team = team_of(ev.disadvantaged_side);
        }

        if (ev.committing_side != Side::Unknown && ev.committing_side == ev.disadvantaged_side) {
            reject(rec, "committing and disadvantaged side coincide");
            continue;
        }

        if (ev.is_cnc()) ++result.cnc_rows;
        result.events.push_back(std::move(ev));
    }
    result.report.retained = result.events.size();
    return result;
}

TechFoulParseResult parse_tech_fouls(std::string_view source, const ColumnMapping& mapping,
                                     const AliasTable& aliases) {
    const csv::Table table = load_table(source, mapping);
    const Binder cols(table, mapping, {"game_id", "referee", "player"}, {"description", "clock"});
    const auto exclude = mapping.values("exclude");
    const auto include = mapping.values("include");

    TechFoulParseResult result;
    result.report.total_rows = table.rows.size();
    for (const auto& rec : table.rows) {
        const auto description = cols.get(rec, "description");
        bool keep = include.empty();
        for (const auto& pat : include) keep = keep || text::icontains(description, pat);
        for (const auto& pat : exclude) keep = keep && !text::icontains(description, pat);
        if (!keep) {
            ++result.report.filtered;
            continue;
        }

        TechFoulEvent ev;
        ev.game_id = std::string(cols.get(rec, "game_id"));
        auto referee = person_key(cols.get(rec, "referee"), aliases);
        auto player = person_key(cols.get(rec, "player"), aliases);
        if (ev.game_id.empty() || !referee || !player) {
            result.report.rejections.push_back(
                Rejection{rec.row_number, "technical foul without game, referee or player", rec.raw});
            continue;
        }
        ev.referee = std::move(*referee);
        ev.player = std::move(*player);
        if (auto clock = cols.get(rec, "clock"); !clock.empty()) ev.game_clock_context = std::string(clock);
        result.events.push_back(std::move(ev));
    }
    result.report.retained = result.events.size();
    return result;
}

BoxScoreParseResult parse_box_scores(std::string_view source, const ColumnMapping& mapping,
                                     const AliasTable& aliases) {
    const csv::Table table = load_table(source, mapping);
    const Binder cols(table, mapping, {"game_id", "player", "minutes"}, {});
    const double cap = setting_int(mapping, "minutes.cap", 65);

    BoxScoreParseResult result;
    result.report.total_rows = table.rows.size();
    for (const auto& rec : table.rows) {
        auto reject = [&](std::string reason) {
            result.report.rejections.push_back(Rejection{rec.row_number, std::move(reason), rec.raw});
        };
        BoxScoreLine line;
        line.game_id = std::string(cols.get(rec, "game_id"));
        auto player = person_key(cols.get(rec, "player"), aliases);
        if (line.game_id.empty() || !player) {
            reject("box score line without game or player");
            continue;
        }
        line.player = std::move(*player);
        const auto raw_minutes = cols.get(rec, "minutes");
        if (raw_minutes.empty()) {
            // DNP rows carry no minutes.
            ++result.report.filtered;
            continue;
        }
        const auto minutes = parse_minutes(raw_minutes);
        if (!minutes) {
            reject("unparseable minutes '" + std::string(raw_minutes) + "'");
            continue;
        }
        if (*minutes < 0.0) {
            reject("negative minutes");
            continue;
        }
        if (*minutes > cap) {
            reject("minutes above cap");
            continue;
        }
        line.minutes_played = *minutes;
        result.lines.push_back(std::move(line));
    }
    result.report.retained = result.lines.size();
    return result;
}

DemographicsParseResult parse_demographics(std::string_view source, const ColumnMapping& mapping,
                                           const AliasTable& aliases) {
    const csv::Table table = load_table(source, mapping);
    const Binder cols(table, mapping, {"person", "race"}, {"role"});

    DemographicsParseResult result;
    result.report.total_rows = table.rows.size();
    for (const auto& rec : table.rows) {
        auto person = person_key(cols.get(rec, "person"), aliases);
        if (!person) {
            result.report.rejections.push_back(Rejection{rec.row_number, "missing person", rec.raw});
            continue;
        }
        PersonDemographics d;
        d.person = std::move(*person);
        const auto role = cols.get(rec, "role");
        if (in_vocab(mapping.values("role.referee"), role)) {
            d.role = PersonRole::Referee;
        } else if (role.empty() || in_vocab(mapping.values("role.player"), role)) {
            d.role = PersonRole::Player;
        } else {
            result.report.rejections.push_back(
                Rejection{rec.row_number, "unknown role '" + std::string(role) + "'", rec.raw});
            continue;
        }
        const auto race = cols.get(rec, "race");
        if (in_vocab(mapping.values("race.white"), race)) {
            d.race = Race::White;
        } else if (in_vocab(mapping.values("race.black"), race)) {
            d.race = Race::Black;
        } else if (race.empty()) {
            d.race = Race::Unknown;
        } else {
            d.race = Race::Other;
        }
        result.people.push_back(std::move(d));
    }
    result.report.retained = result.people.size();
    return result;
}

OfficialsParseResult parse_officials(std::string_view source, const ColumnMapping& mapping,
                                     const AliasTable& aliases) {
    const csv::Table table = load_table(source, mapping);
    const Binder cols(table, mapping, {"game_id", "referee"}, {});

    OfficialsParseResult result;
    result.report.total_rows = table.rows.size();
    for (const auto& rec : table.rows) {
        OfficialAssignment a;
        a.game_id = std::string(cols.get(rec, "game_id"));
        auto referee = person_key(cols.get(rec, "referee"), aliases);
        if (a.game_id.empty() || !referee) {
            result.report.rejections.push_back(Rejection{rec.row_number, "assignment without game or referee", rec.raw});
            continue;
        }
        a.referee = std::move(*referee);
        result.assignments.push_back(std::move(a));
    }
    result.report.retained = result.assignments.size();
    return result;
}

void write_canonical_l2m(std::ostream& out, const std::vector<GradedEvent>& events) {
    csv::Writer w(out);
    w.row({"game_id", "season", "season_type", "violation_type", "decision", "committing_side",
           "disadvantaged_side", "committing_player", "disadvantaged_player", "committing_team",
           "disadvantaged_team"});
    auto opt = [](const std::optional<std::string>& s) { return s.value_or(std::string{}); };
    auto side = [](Side s) { return s == Side::Unknown ? std::string{} : std::string(to_string(s)); };
    for (const auto& e : events) {
        w.row({e.game_id, std::to_string(e.season), std::string(to_string(e.season_type)), e.violation_type,
               std::string(to_string(e.decision)), side(e.committing_side),
               side(e.disadvantaged_side), opt(e.committing_player), opt(e.disadvantaged_player),
               opt(e.committing_team), opt(e.disadvantaged_team)});
    }
}

std::string to_canonical_l2m(const std::vector<GradedEvent>& events) {
    std::ostringstream out;
    write_canonical_l2m(out, events);
    return out.str();
}

}  // namespace whistle
