#pragma once

// Report documents: a metadata block (inputs, hashes, seed, rerun command)
// followed by named result tables, rendered as CSV or JSON.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace whistle {

enum class ReportFormat { Csv, Json };

std::optional<ReportFormat> parse_report_format(std::string_view s);

struct ReportTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::ordered_json>> rows;  // scalar cells; null renders empty in CSV
};

struct Report {
    nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
    std::vector<ReportTable> tables;

    void write(std::ostream& out, ReportFormat format) const;
    std::string render(ReportFormat format) const;

    /// The rendering without the metadata block, for golden comparisons.
    std::string render_results(ReportFormat format) const;
};

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace whistle
