#include "table.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ifm::cli {

namespace {

bool cell_matches(const Cell& cell, ColumnType type) {
    switch (type) {
        case ColumnType::integer: return std::holds_alternative<std::int64_t>(cell);
        case ColumnType::real: return std::holds_alternative<double>(cell);
        case ColumnType::text: return std::holds_alternative<std::string>(cell);
        case ColumnType::boolean: return std::holds_alternative<bool>(cell);
    }
    return false;
}

std::string quote_csv(const std::string& text) {
    if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string cell_text(const Cell& cell) {
    struct Visitor {
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(const std::string& v) const { return quote_csv(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
    };
    return std::visit(Visitor{}, cell);
}

nlohmann::ordered_json cell_json(const Cell& cell) {
    struct Visitor {
        nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
        nlohmann::ordered_json operator()(double v) const {
            if (std::isfinite(v)) return v;
            return format_double(v);
        }
        nlohmann::ordered_json operator()(const std::string& v) const { return v; }
        nlohmann::ordered_json operator()(bool v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                current += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                current += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += ch;
        }
    }
    if (quoted) throw std::runtime_error("unterminated quote in CSV line");
    fields.push_back(std::move(current));
    return fields;
}

Cell parse_cell(const std::string& text, const Column& column) {
    switch (column.type) {
        case ColumnType::integer: {
            std::int64_t v = 0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || ptr != text.data() + text.size()) {
                throw std::runtime_error("column " + column.name + ": not an integer: '" + text + "'");
            }
            return v;
        }
        case ColumnType::real:
            try {
                return parse_double(text);
            } catch (const std::invalid_argument&) {
                throw std::runtime_error("column " + column.name + ": not a number: '" + text + "'");
            }
        case ColumnType::text: return text;
        case ColumnType::boolean:
            if (text == "true") return true;
            if (text == "false") return false;
            throw std::runtime_error("column " + column.name + ": not a boolean: '" + text + "'");
    }
    throw std::logic_error("unknown column type");
}

Cell parse_json_cell(const nlohmann::ordered_json& value, const Column& column) {
    switch (column.type) {
        case ColumnType::integer:
            if (value.is_number_integer()) return value.get<std::int64_t>();
            break;
        case ColumnType::real:
            if (value.is_number()) return value.get<double>();
            if (value.is_string()) return parse_cell(value.get<std::string>(), column);
            break;
        case ColumnType::text:
            if (value.is_string()) return value.get<std::string>();
            break;
        case ColumnType::boolean:
            if (value.is_boolean()) return value.get<bool>();
            break;
    }
    throw std::runtime_error("column " + column.name + ": unexpected JSON value " + value.dump());
}

void check_header(const std::vector<std::string>& names, const Schema& schema) {
    bool ok = names.size() == schema.size();
    for (std::size_t i = 0; ok && i < names.size(); ++i) ok = names[i] == schema[i].name;
    if (!ok) {
        std::string expected;
        for (const auto& c : schema) expected += (expected.empty() ? "" : ",") + c.name;
        throw std::runtime_error("header does not match schema; expected " + expected);
    }
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != schema.size()) throw std::logic_error("row arity does not match schema");
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (!cell_matches(row[i], schema[i].type)) {
            throw std::logic_error("cell type mismatch in column " + schema[i].name);
        }
    }
    rows.push_back(std::move(row));
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::logic_error("double formatting failed");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("not a number: " + std::string(text));
    }
    return v;
}

std::string_view to_string(ColumnType type) {
    switch (type) {
        case ColumnType::integer: return "integer";
        case ColumnType::real: return "real";
        case ColumnType::text: return "text";
        case ColumnType::boolean: return "boolean";
    }
    return "?";
}

void write_csv(std::ostream& out, const Table& table) {
    out << "# " << table.metadata.dump() << '\n';
    for (std::size_t i = 0; i < table.schema.size(); ++i) {
        out << (i ? "," : "") << table.schema[i].name;
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
        out << '\n';
    }
}

void write_json(std::ostream& out, const Table& table) {
    nlohmann::ordered_json doc;
    doc["metadata"] = table.metadata;
    doc["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : table.schema) {
        doc["columns"].push_back({{"name", c.name}, {"type", std::string(to_string(c.type))}});
    }
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& cell : row) r.push_back(cell_json(cell));
        doc["rows"].push_back(std::move(r));
    }
    out << doc.dump(1) << '\n';
}

Table read_csv(std::istream& in, const Schema& schema) {
    Table table;
    table.schema = schema;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (!have_header) {
                try {
                    table.metadata = nlohmann::ordered_json::parse(line.substr(1));
                } catch (const nlohmann::json::exception& e) {
                    throw std::runtime_error(std::string("bad metadata line: ") + e.what());
                }
            }
            continue;
        }
        auto fields = split_csv_line(line);
        if (!have_header) {
            check_header(fields, schema);
            have_header = true;
            continue;
        }
        if (fields.size() != schema.size()) throw std::runtime_error("row has wrong number of fields: " + line);
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) row.push_back(parse_cell(fields[i], schema[i]));
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw std::runtime_error("missing CSV header");
    return table;
}

Table read_json(std::istream& in, const Schema& schema) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("columns") || !doc.contains("rows")) {
        throw std::runtime_error("JSON document lacks columns or rows");
    }
    Table table;
    table.schema = schema;
    if (doc.contains("metadata")) table.metadata = doc["metadata"];

    std::vector<std::string> names;
    for (const auto& c : doc["columns"]) {
        names.push_back(c.at("name").get<std::string>());
    }
    check_header(names, schema);
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (doc["columns"][i].at("type").get<std::string>() != to_string(schema[i].type)) {
            throw std::runtime_error("column " + schema[i].name + " has the wrong type");
        }
    }
    for (const auto& r : doc["rows"]) {
        if (!r.is_array() || r.size() != schema.size()) throw std::runtime_error("row has wrong number of fields");
        std::vector<Cell> row;
        for (std::size_t i = 0; i < schema.size(); ++i) row.push_back(parse_json_cell(r[i], schema[i]));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace ifm::cli
