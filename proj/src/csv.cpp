#include "whistle/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "whistle/text.hpp"
#include "whistle/types.hpp"

namespace whistle::csv {

std::optional<std::size_t> Table::column(std::string_view name) const {
    const auto wanted = text::trim(name);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (text::iequals(text::trim(header[i]), wanted)) return i;
    }
    return std::nullopt;
}

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    bool done() const { return pos >= text.size(); }
};

// Reads one record starting at `c.pos`. Returns false at end of input.
bool next_record(Cursor& c, char delim, std::vector<std::string>& fields, std::string& raw) {
    fields.clear();
    raw.clear();
    if (c.done()) return false;

    const std::size_t start = c.pos;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    while (!c.done()) {
        const char ch = c.text[c.pos];
        if (in_quotes) {
            if (ch == '"') {
                if (c.pos + 1 < c.text.size() && c.text[c.pos + 1] == '"') {
                    field += '"';
                    c.pos += 2;
                    continue;
                }
                in_quotes = false;
                ++c.pos;
                continue;
            }
            field += ch;
            ++c.pos;
            continue;
        }
        if (ch == '"' && field.empty() && !field_was_quoted) {
            in_quotes = true;
            field_was_quoted = true;
            ++c.pos;
            continue;
        }
        if (ch == delim) {
            fields.push_back(std::move(field));
            field.clear();
            field_was_quoted = false;
            ++c.pos;
            continue;
        }
        if (ch == '\n' || ch == '\r') {
            std::size_t end = c.pos;
            ++c.pos;
            if (ch == '\r' && !c.done() && c.text[c.pos] == '\n') ++c.pos;
            fields.push_back(std::move(field));
            raw.assign(c.text.substr(start, end - start));
            return true;
        }
        field += ch;
        ++c.pos;
    }
    fields.push_back(std::move(field));
    raw.assign(c.text.substr(start));
    return true;
}

bool blank(const std::vector<std::string>& fields, std::string_view raw) {
    return fields.size() == 1 && text::trim(raw).empty();
}

}  // namespace

Table parse(std::string_view text, char delimiter) {
    // Skip a UTF-8 byte order mark.
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    Table table;
    Cursor cursor{text};
    std::vector<std::string> fields;
    std::string raw;
    bool have_header = false;
    std::size_t row_number = 0;
    while (next_record(cursor, delimiter, fields, raw)) {
        if (blank(fields, raw)) continue;
        if (!have_header) {
            table.header = fields;
            have_header = true;
            continue;
        }
        table.rows.push_back(Record{++row_number, fields, raw});
    }
    return table;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string Writer::escape(std::string_view field, char delimiter, bool always_quote_text) {
    bool needs = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos;
    if (!needs && always_quote_text && !field.empty()) {
        const bool numeric = field.find_first_not_of("0123456789+-.eE") == std::string_view::npos;
        needs = !numeric;
    }
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

void Writer::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << delim_;
        out_ << escape(fields[i], delim_);
    }
    out_ << '\n';
}

}  // namespace whistle::csv
