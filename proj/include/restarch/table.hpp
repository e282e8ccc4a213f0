#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "restarch/uri_model.hpp"

namespace restarch {

/// Rectangular, column-named table; the payload of listings and searches.
class ResultTable {
public:
    using Row = std::vector<std::string>;

    ResultTable() = default;

    /// Throws ParseError on duplicate column names.
    explicit ResultTable(std::vector<std::string> columns);

    /// Throws ParseError if the row width differs from the column count.
    void add_row(Row row);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<Row>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }
    bool empty() const noexcept { return rows_.empty(); }

    std::optional<std::size_t> index_of(std::string_view column) const;

    /// Values of one column, in row order. Throws ParseError if absent.
    std::vector<std::string> column(std::string_view name) const;

    std::string to_csv() const;
    std::string to_json() const;

    bool operator==(const ResultTable&) const = default;

private:
    std::vector<std::string> columns_;
    std::vector<Row> rows_;
};

/// RFC 4180 reader: header row first, quoted fields may hold commas,
/// quotes ("") and line breaks; CRLF and LF line ends are both accepted.
ResultTable parse_csv(std::string_view text);

/// `{"columns": [...], "result": [{col: value, ...}, ...]}`. When
/// "columns" is absent the key order of the first row object is used.
ResultTable parse_json_table(std::string_view text);

ResultTable parse_table(std::string_view text, Format format);

}  // namespace restarch
