#include "restarch/table.hpp"

#include <algorithm>
#include <set>

#include "restarch/error.hpp"

namespace restarch {

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    std::set<std::string_view> seen;
    for (const auto& c : columns_) {
        if (!seen.insert(c).second) throw ParseError("duplicate column '" + c + "'");
    }
}

void ResultTable::add_row(Row row) {
    if (row.size() != columns_.size()) {
        throw ParseError("row has " + std::to_string(row.size()) + " fields, expected " +
                         std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(row));
}

std::optional<std::size_t> ResultTable::index_of(std::string_view column) const {
    auto it = std::find(columns_.begin(), columns_.end(), column);
    if (it == columns_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<std::string> ResultTable::column(std::string_view name) const {
    auto idx = index_of(name);
    if (!idx) throw ParseError("no column '" + std::string(name) + "'");
    std::vector<std::string> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r[*idx]);
    return out;
}

namespace {

void write_field(std::string& out, const std::string& f, bool lone) {
    bool quote = f.find_first_of(",\"\r\n") != std::string::npos || (lone && f.empty());
    if (!quote) {
        out += f;
        return;
    }
    out += '"';
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

void write_row(std::string& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        // A single empty field must be quoted or the line reads as blank.
        write_field(out, row[i], row.size() == 1);
    }
    out += '\n';
}

}  // namespace

std::string ResultTable::to_csv() const {
    std::string out;
    write_row(out, columns_);
    for (const auto& r : rows_) write_row(out, r);
    return out;
}

std::string ResultTable::to_json() const {
    nlohmann::ordered_json doc;
    doc["columns"] = columns_;
    auto& result = doc["result"] = nlohmann::ordered_json::array();
    for (const auto& r : rows_) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < columns_.size(); ++i) obj[columns_[i]] = r[i];
        result.push_back(std::move(obj));
    }
    return doc.dump();
}

ResultTable parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;  // distinguishes `""` from an absent field
    std::size_t i = 0;

    auto end_record = [&]() {
        record.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(record));
        record.clear();
        field_started = false;
    };

    while (i < text.size()) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                in_quotes = false;
                ++i;
                if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                    throw ParseError("unexpected character after closing quote at offset " + std::to_string(i));
                }
                continue;
            }
            field += c;
            ++i;
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty()) throw ParseError("stray quote at offset " + std::to_string(i));
                in_quotes = true;
                field_started = true;
                ++i;
                break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                field_started = true;
                ++i;
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                [[fallthrough]];
            case '\n':
                end_record();
                ++i;
                break;
            default:
                field += c;
                field_started = true;
                ++i;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field");
    if (field_started || !record.empty()) end_record();

    if (records.empty()) throw ParseError("empty CSV payload (no header row)");
    ResultTable table(std::move(records.front()));
    for (std::size_t r = 1; r < records.size(); ++r) {
        // A blank line can only be a record in a one-column table, where
        // the writer quotes empty values; treat unquoted blanks as noise.
        auto& rec = records[r];
        if (rec.size() == 1 && rec[0].empty() && table.columns().size() != 1) {
            throw ParseError("blank line in CSV body at record " + std::to_string(r));
        }
        table.add_row(std::move(rec));
    }
    return table;
}

ResultTable parse_json_table(std::string_view text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed JSON table: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("result") || !doc["result"].is_array()) {
        throw ParseError("JSON table lacks a 'result' array");
    }
    const auto& rows = doc["result"];
    std::vector<std::string> columns;
    if (doc.contains("columns")) {
        if (!doc["columns"].is_array()) throw ParseError("'columns' must be an array");
        for (const auto& c : doc["columns"]) {
            if (!c.is_string()) throw ParseError("column names must be strings");
            columns.push_back(c.get<std::string>());
        }
    } else if (!rows.empty()) {
        if (!rows[0].is_object()) throw ParseError("result rows must be objects");
        for (const auto& [k, v] : rows[0].items()) columns.push_back(k);
    }
    ResultTable table(columns);
    for (const auto& obj : rows) {
        if (!obj.is_object()) throw ParseError("result rows must be objects");
        if (obj.size() != columns.size()) throw ParseError("result row width differs from column count");
        ResultTable::Row row;
        for (const auto& c : columns) {
            auto it = obj.find(c);
            if (it == obj.end()) throw ParseError("result row lacks column '" + c + "'");
            if (it->is_string()) {
                row.push_back(it->get<std::string>());
            } else if (it->is_number() || it->is_boolean()) {
                row.push_back(it->dump());
            } else if (it->is_null()) {
                row.emplace_back();
            } else {
                throw ParseError("unsupported JSON value in column '" + c + "'");
            }
        }
        table.add_row(std::move(row));
    }
    return table;
}

ResultTable parse_table(std::string_view text, Format format) {
    return format == Format::csv ? parse_csv(text) : parse_json_table(text);
}

}  // namespace restarch
