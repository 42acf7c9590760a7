#pragma once

// Key-value configuration documents (INI-style) for column mappings and
// alias tables. Format reference: docs/config-format.md.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace whistle {

inline constexpr int kConfigSchemaVersion = 1;

class KeyValueDoc {
public:
    /// Parses text; throws ConfigError on malformed lines or an unsupported
    /// schema_version. A missing schema_version is treated as the current one.
    static KeyValueDoc parse(std::string_view text);
    static KeyValueDoc load(const std::string& path);

    std::optional<std::string> get(std::string_view section, std::string_view key) const;
    const std::vector<std::pair<std::string, std::string>>& entries(std::string_view section) const;
    bool has_section(std::string_view section) const;
    int schema_version() const noexcept { return schema_version_; }

private:
    std::map<std::string, std::vector<std::pair<std::string, std::string>>, std::less<>> sections_;
    int schema_version_ = kConfigSchemaVersion;
};

/// Binds canonical field names to source columns for one input table, plus
/// value vocabularies (e.g. which strings mean "home").
struct ColumnMapping {
    char delimiter = ',';
    std::map<std::string, std::string, std::less<>> columns;                 // canonical -> source header
    std::map<std::string, std::vector<std::string>, std::less<>> vocab;      // "side.home" -> {"home"}
    std::map<std::string, std::string, std::less<>> settings;                // any other key

    std::optional<std::string> column(std::string_view canonical) const;
    std::vector<std::string> values(std::string_view vocab_key) const;
    std::optional<std::string> setting(std::string_view key) const;

    /// Reads `[section]` of a document. Keys "column.X" bind columns, keys
    /// with a comma-list value under known vocab prefixes become vocabularies.
    static ColumnMapping from_section(const KeyValueDoc& doc, std::string_view section);
};

/// Defaults matching the canonical CSV schemas this tool writes.
ColumnMapping default_l2m_mapping();
ColumnMapping default_tech_foul_mapping();
ColumnMapping default_box_score_mapping();
ColumnMapping default_demographics_mapping();
ColumnMapping default_officials_mapping();

/// Loads a mapping section from a document, falling back to the default for
/// any key the section leaves out.
ColumnMapping merged_mapping(const ColumnMapping& defaults, const KeyValueDoc& doc, std::string_view section);

class AliasTable {
public:
    AliasTable() = default;
    static AliasTable from_doc(const KeyValueDoc& doc);

    /// Adds an alias; `raw` is normalized with the same canonicalization the
    /// lookup applies.
    void add_violation(std::string_view raw, std::string canonical);
    void add_person(std::string_view raw, std::string canonical);
    void add_team(std::string_view raw, std::string canonical);

    std::optional<std::string> violation(std::string_view normalized) const;
    std::optional<std::string> person(std::string_view normalized) const;
    std::optional<std::string> team(std::string_view normalized) const;

    bool empty() const noexcept { return violations_.empty() && persons_.empty() && teams_.empty(); }

private:
    std::map<std::string, std::string, std::less<>> violations_;
    std::map<std::string, std::string, std::less<>> persons_;
    std::map<std::string, std::string, std::less<>> teams_;
};

}  // namespace whistle
