#pragma once

// Minimal RFC 4180 style reader/writer. Quoted fields may contain the
// delimiter, doubled quotes, and newlines.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace whistle::csv {

struct Record {
    std::size_t row_number = 0;  // 1-based data row (header excluded)
    std::vector<std::string> fields;
    std::string raw;  // source text of the record, without trailing newline
};

struct Table {
    std::vector<std::string> header;
    std::vector<Record> rows;

    /// Index of a header column, case-insensitive, whitespace-trimmed.
    std::optional<std::size_t> column(std::string_view name) const;
};

/// Parses the full text. An empty input (or one without a header line)
/// yields an empty header. Blank lines are ignored.
Table parse(std::string_view text, char delimiter = ',');

std::string read_file(const std::string& path);

class Writer {
public:
    explicit Writer(std::ostream& out, char delimiter = ',') : out_(out), delim_(delimiter) {}

    void row(const std::vector<std::string>& fields);

    /// Quotes a field when it holds the delimiter, a quote, or a line break.
    /// `always_quote_text` forces quoting of non-numeric text.
    static std::string escape(std::string_view field, char delimiter, bool always_quote_text = false);

private:
    std::ostream& out_;
    char delim_;
};

}  // namespace whistle::csv
