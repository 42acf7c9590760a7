#include "whistle/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <ostream>
#include <sstream>

#include "whistle/csv.hpp"
#include "whistle/text.hpp"

namespace whistle {

std::optional<ReportFormat> parse_report_format(std::string_view s) {
    if (text::iequals(s, "csv")) return ReportFormat::Csv;
    if (text::iequals(s, "json")) return ReportFormat::Json;
    return std::nullopt;
}

namespace {

std::string csv_cell(const nlohmann::ordered_json& v) {
    if (v.is_null()) return {};
    if (v.is_string()) return csv::Writer::escape(v.get<std::string>(), ',', true);
    return v.dump();
}

void write_metadata_csv(std::ostream& out, const nlohmann::ordered_json& meta, const std::string& prefix) {
    for (const auto& [key, value] : meta.items()) {
        if (value.is_object()) {
            write_metadata_csv(out, value, prefix + key + ".");
        } else {
            out << "# " << prefix << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump())
                << '\n';
        }
    }
}

void write_tables_csv(std::ostream& out, const std::vector<ReportTable>& tables) {
    bool first = true;
    for (const auto& t : tables) {
        if (!first) out << '\n';
        first = false;
        out << "# " << t.name << '\n';
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            out << (i ? "," : "") << csv::Writer::escape(t.columns[i], ',', true);
        }
        out << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
            out << '\n';
        }
    }
}

nlohmann::ordered_json tables_json(const std::vector<ReportTable>& tables) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& t : tables) {
        auto rows = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            nlohmann::ordered_json obj = nlohmann::ordered_json::object();
            for (std::size_t i = 0; i < t.columns.size() && i < row.size(); ++i) obj[t.columns[i]] = row[i];
            rows.push_back(std::move(obj));
        }
        out[t.name] = std::move(rows);
    }
    return out;
}

}  // namespace

void Report::write(std::ostream& out, ReportFormat format) const {
    if (format == ReportFormat::Json) {
        nlohmann::ordered_json doc;
        doc["metadata"] = metadata;
        doc["results"] = tables_json(tables);
        out << doc.dump(2) << '\n';
        return;
    }
    out << "# metadata\n";
    write_metadata_csv(out, metadata, "");
    out << '\n';
    write_tables_csv(out, tables);
}

std::string Report::render(ReportFormat format) const {
    std::ostringstream out;
    write(out, format);
    return out.str();
}

std::string Report::render_results(ReportFormat format) const {
    std::ostringstream out;
    if (format == ReportFormat::Json) {
        out << tables_json(tables).dump(2) << '\n';
    } else {
        write_tables_csv(out, tables);
    }
    return out.str();
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

}  // namespace whistle
