#include "sgboost/table.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "sgboost/error.hpp"

namespace sgboost {

std::optional<std::size_t> Table::find_column(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) {
            return j;
        }
    }
    return std::nullopt;
}

std::size_t Table::column(std::string_view name) const {
    auto j = find_column(name);
    if (!j) {
        fail(ErrorCode::MissingColumn, "column '" + std::string(name) + "' not found in table");
    }
    return *j;
}

Table Table::select_rows(const std::vector<std::size_t>& indices) const {
    Table out;
    out.header = header;
    out.rows.reserve(indices.size());
    for (std::size_t i : indices) {
        out.rows.push_back(rows.at(i));
    }
    return out;
}

namespace {

// Reads one logical record; returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t line) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    bool after_quote = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                    after_quote = true;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            after_quote = false;
        } else if (c == '\n') {
            break;
        } else if (c == '\r') {
            if (in.peek() == '\n') {
                in.get(c);
            }
            break;
        } else if (c == '"' && field.empty() && !after_quote) {
            in_quotes = true;
        } else {
            if (after_quote) {
                fail(ErrorCode::Parse, "unexpected character after closing quote on line " +
                                           std::to_string(line));
            }
            field.push_back(c);
        }
    }
    if (in_quotes) {
        fail(ErrorCode::Parse, "unterminated quoted field starting on line " + std::to_string(line));
    }
    if (!any) {
        return false;
    }
    fields.push_back(std::move(field));
    return true;
}

}  // namespace

Table parse_csv(std::istream& in) {
    Table table;
    std::vector<std::string> fields;
    std::size_t line = 1;
    if (!read_record(in, table.header, line)) {
        fail(ErrorCode::Parse, "empty CSV input");
    }
    // UTF-8 byte order mark
    if (!table.header.empty() && table.header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
        table.header[0].erase(0, 3);
    }
    while (read_record(in, fields, ++line)) {
        if (fields.size() == 1 && fields[0].empty()) {
            continue;  // blank line
        }
        if (fields.size() != table.header.size()) {
            fail(ErrorCode::Parse, "line " + std::to_string(line) + " has " +
                                       std::to_string(fields.size()) + " fields, header has " +
                                       std::to_string(table.header.size()));
        }
        table.rows.push_back(fields);
    }
    return table;
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
    }
    return parse_csv(in);
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_csv(std::ostream& out, const Table& table) {
    auto write_row = [&out](const std::vector<std::string>& row) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << csv_escape(row[j]);
        }
        out << '\n';
    };
    write_row(table.header);
    for (const auto& row : table.rows) {
        write_row(row);
    }
}

}  // namespace sgboost
