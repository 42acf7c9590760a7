#include "whistle/config.hpp"

#include <charconv>

#include "whistle/csv.hpp"
#include "whistle/ingest.hpp"
#include "whistle/text.hpp"
#include "whistle/types.hpp"

namespace whistle {

namespace {

const std::vector<std::pair<std::string, std::string>> kEmpty;

constexpr std::string_view kVocabPrefixes[] = {"side.", "season_type.", "race.", "role."};

bool is_vocab_key(std::string_view key) {
    if (key == "season_type.playoff_game_prefix") return false;
    for (auto prefix : kVocabPrefixes) {
        if (key.starts_with(prefix)) return true;
    }
    return key == "exclude" || key == "include";
}

std::vector<std::string> comma_list(std::string_view value) {
    std::vector<std::string> out;
    for (auto& part : text::split(value, ',')) {
        auto t = text::trim(part);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

char parse_delimiter(std::string_view v) {
    if (v == "\\t" || text::iequals(v, "tab")) return '\t';
    if (v.size() != 1) throw ConfigError("delimiter must be a single character or 'tab', got: " + std::string(v));
    return v.front();
}

}  // namespace

KeyValueDoc KeyValueDoc::parse(std::string_view content) {
    KeyValueDoc doc;
    std::string section;
    std::size_t line_no = 0;
    for (const auto& line_raw : text::split(content, '\n')) {
        ++line_no;
        const auto line = text::trim(line_raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
            section = std::string(text::trim(line.substr(1, line.size() - 2)));
            doc.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key(text::trim(line.substr(0, eq)));
        std::string value(text::trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (section.empty() && key == "schema_version") {
            int v = 0;
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size()) {
                throw ConfigError("schema_version must be an integer");
            }
            if (v != kConfigSchemaVersion) {
                throw ConfigError("unsupported schema_version " + value + " (expected " +
                                  std::to_string(kConfigSchemaVersion) + ")");
            }
            doc.schema_version_ = v;
            continue;
        }
        doc.sections_[section].emplace_back(std::move(key), std::move(value));
    }
    return doc;
}

KeyValueDoc KeyValueDoc::load(const std::string& path) { return parse(csv::read_file(path)); }

std::optional<std::string> KeyValueDoc::get(std::string_view section, std::string_view key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return std::nullopt;
    // Last assignment wins.
    for (auto e = it->second.rbegin(); e != it->second.rend(); ++e) {
        if (e->first == key) return e->second;
    }
    return std::nullopt;
}

const std::vector<std::pair<std::string, std::string>>& KeyValueDoc::entries(std::string_view section) const {
    auto it = sections_.find(section);
    return it == sections_.end() ? kEmpty : it->second;
}

bool KeyValueDoc::has_section(std::string_view section) const { return sections_.contains(section); }

std::optional<std::string> ColumnMapping::column(std::string_view canonical) const {
    auto it = columns.find(canonical);
    if (it == columns.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

std::vector<std::string> ColumnMapping::values(std::string_view vocab_key) const {
    auto it = vocab.find(vocab_key);
    return it == vocab.end() ? std::vector<std::string>{} : it->second;
}

std::optional<std::string> ColumnMapping::setting(std::string_view key) const {
    auto it = settings.find(key);
    if (it == settings.end()) return std::nullopt;
    return it->second;
}

ColumnMapping ColumnMapping::from_section(const KeyValueDoc& doc, std::string_view section) {
    ColumnMapping m;
    for (const auto& [key, value] : doc.entries(section)) {
        if (key == "delimiter") {
            m.delimiter = parse_delimiter(value);
        } else if (key.starts_with("column.")) {
            m.columns[key.substr(7)] = value;
        } else if (is_vocab_key(key)) {
            m.vocab[key] = comma_list(value);
        } else {
            m.settings[key] = value;
        }
    }
    return m;
}

ColumnMapping merged_mapping(const ColumnMapping& defaults, const KeyValueDoc& doc, std::string_view section) {
    ColumnMapping out = defaults;
    const ColumnMapping loaded = ColumnMapping::from_section(doc, section);
    for (const auto& [key, value] : doc.entries(section)) {
        if (key == "delimiter") out.delimiter = loaded.delimiter;
    }
    for (const auto& [k, v] : loaded.columns) out.columns[k] = v;
    for (const auto& [k, v] : loaded.vocab) out.vocab[k] = v;
    for (const auto& [k, v] : loaded.settings) out.settings[k] = v;
    return out;
}

ColumnMapping default_l2m_mapping() {
    ColumnMapping m;
    for (const char* c : {"game_id", "season", "season_type", "violation_type", "decision", "committing_side",
                          "disadvantaged_side", "committing_player", "disadvantaged_player", "committing_team",
                          "disadvantaged_team"}) {
        m.columns[c] = c;
    }
    m.vocab["side.home"] = {"home"};
    m.vocab["side.visiting"] = {"visiting", "away", "visitor"};
    m.vocab["season_type.playoffs"] = {"playoffs", "playoff"};
    m.vocab["season_type.regular"] = {"regular", "regular season"};
    m.settings["season.first"] = "2015";
    m.settings["season.last"] = "2022";
    return m;
}

ColumnMapping default_tech_foul_mapping() {
    ColumnMapping m;
    for (const char* c : {"game_id", "referee", "player", "description", "clock"}) m.columns[c] = c;
    m.vocab["exclude"] = {"delay",           "3 sec",          "defensive 3",      "defense 3",
                          "defensive three", "illegal defense", "too many players", "excess timeout",
                          "non-unsportsmanlike"};
    return m;
}

ColumnMapping default_box_score_mapping() {
    ColumnMapping m;
    for (const char* c : {"game_id", "player", "minutes"}) m.columns[c] = c;
    m.settings["minutes.cap"] = "65";
    return m;
}

ColumnMapping default_demographics_mapping() {
    ColumnMapping m;
    for (const char* c : {"person", "role", "race"}) m.columns[c] = c;
    m.vocab["race.white"] = {"white", "w"};
    m.vocab["race.black"] = {"black", "b", "african american"};
    m.vocab["race.other"] = {"other", "asian", "hispanic", "mixed"};
    m.vocab["role.referee"] = {"referee", "ref", "official"};
    m.vocab["role.player"] = {"player"};
    return m;
}

ColumnMapping default_officials_mapping() {
    ColumnMapping m;
    for (const char* c : {"game_id", "referee"}) m.columns[c] = c;
    return m;
}

AliasTable AliasTable::from_doc(const KeyValueDoc& doc) {
    AliasTable t;
    for (const auto& [k, v] : doc.entries("violation")) t.add_violation(k, v);
    for (const auto& [k, v] : doc.entries("person")) t.add_person(k, v);
    for (const auto& [k, v] : doc.entries("team")) t.add_team(k, v);
    return t;
}

void AliasTable::add_violation(std::string_view raw, std::string canonical) {
    violations_[canonical_violation_label(raw)] = canonical_violation_label(canonical);
}

void AliasTable::add_person(std::string_view raw, std::string canonical) {
    persons_[text::normalize_key(raw)] = text::normalize_key(canonical);
}

void AliasTable::add_team(std::string_view raw, std::string canonical) {
    teams_[text::normalize_key(raw)] = text::normalize_key(canonical);
}

namespace {
std::optional<std::string> find(const std::map<std::string, std::string, std::less<>>& m, std::string_view k) {
    auto it = m.find(k);
    if (it == m.end()) return std::nullopt;
    return it->second;
}
}  // namespace

std::optional<std::string> AliasTable::violation(std::string_view normalized) const {
    return find(violations_, normalized);
}
std::optional<std::string> AliasTable::person(std::string_view normalized) const { return find(persons_, normalized); }
std::optional<std::string> AliasTable::team(std::string_view normalized) const { return find(teams_, normalized); }

}  // namespace whistle
