#pragma once

// Parsing of L2M grade ledgers, technical-foul events, box-score minutes,
// officiating assignments and demographics into the canonical model.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "whistle/config.hpp"
#include "whistle/types.hpp"

namespace whistle {

struct Rejection {
    std::size_t row = 0;  // 1-based data row
    std::string reason;
    std::string raw;
};

struct ParseReport {
    std::size_t total_rows = 0;
    std::size_t retained = 0;
    std::size_t filtered = 0;  // intentionally dropped (e.g. non-personal technicals)
    std::vector<Rejection> rejections;

    std::size_t skipped() const noexcept { return filtered + rejections.size(); }
};

/// One line per rejection: `row<TAB>reason<TAB>raw`.
void write_rejection_log(std::ostream& out, const ParseReport& report);

struct L2MParseResult {
    std::vector<GradedEvent> events;
    ParseReport report;
    std::size_t cnc_rows = 0;  // retained rows graded CNC
};

/// Canonical label: diacritics folded, lowercased, whitespace collapsed and
/// removed around ':' (" Foul: Personal " -> "foul:personal").
std::string canonical_violation_label(std::string_view raw);

/// Canonical label followed by alias lookup; labels without an alias pass
/// through. Precondition: raw is non-empty after trimming.
std::string normalize_violation_type(std::string_view raw, const AliasTable& aliases = {});

/// Throws ConfigError when a mapped column is absent from the header and
/// NoDataError when the source holds no data rows.
L2MParseResult parse_l2m(std::string_view source, const ColumnMapping& mapping = default_l2m_mapping(),
                         const AliasTable& aliases = {});

struct TechFoulParseResult {
    std::vector<TechFoulEvent> events;
    ParseReport report;
};

TechFoulParseResult parse_tech_fouls(std::string_view source,
                                     const ColumnMapping& mapping = default_tech_foul_mapping(),
                                     const AliasTable& aliases = {});

struct BoxScoreParseResult {
    std::vector<BoxScoreLine> lines;
    ParseReport report;
};

/// Minutes accept decimal ("36.5") or clock ("36:30") notation.
BoxScoreParseResult parse_box_scores(std::string_view source,
                                     const ColumnMapping& mapping = default_box_score_mapping(),
                                     const AliasTable& aliases = {});

struct DemographicsParseResult {
    std::vector<PersonDemographics> people;
    ParseReport report;
};

DemographicsParseResult parse_demographics(std::string_view source,
                                           const ColumnMapping& mapping = default_demographics_mapping(),
                                           const AliasTable& aliases = {});

struct OfficialsParseResult {
    std::vector<OfficialAssignment> assignments;
    ParseReport report;
};

OfficialsParseResult parse_officials(std::string_view source,
                                     const ColumnMapping& mapping = default_officials_mapping(),
                                     const AliasTable& aliases = {});

/// Writes events in the canonical L2M schema read by default_l2m_mapping().
void write_canonical_l2m(std::ostream& out, const std::vector<GradedEvent>& events);
std::string to_canonical_l2m(const std::vector<GradedEvent>& events);

}  // namespace whistle
