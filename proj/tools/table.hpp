#pragma once

// Tabular results with a declared column schema, written as CSV (with a
// JSON metadata comment line) or as a JSON document, and read back with
// schema validation.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ifm::cli {

enum class ColumnType { integer, real, text, boolean };

struct Column {
    std::string name;
    ColumnType type = ColumnType::real;
};

using Schema = std::vector<Column>;
using Cell = std::variant<std::int64_t, double, std::string, bool>;

struct Table {
    Schema schema;
    nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
    std::vector<std::vector<Cell>> rows;

    /// Appends a row after checking arity and cell types against the schema.
    void add_row(std::vector<Cell> row);
};

/// Shortest decimal string that parses back to the same double; "inf", "-inf", "nan".
std::string format_double(double value);
double parse_double(std::string_view text);

/// "# {metadata}" line, header row, one line per row.
void write_csv(std::ostream& out, const Table& table);
/// {"metadata": ..., "columns": [{"name", "type"}...], "rows": [[...]...]}.
/// Non-finite reals are written as the strings "inf", "-inf", "nan".
void write_json(std::ostream& out, const Table& table);

/// Parse a document produced by write_csv / write_json. Throws
/// std::runtime_error when the header or any cell does not fit the schema.
Table read_csv(std::istream& in, const Schema& schema);
Table read_json(std::istream& in, const Schema& schema);

std::string_view to_string(ColumnType type);

}  // namespace ifm::cli
