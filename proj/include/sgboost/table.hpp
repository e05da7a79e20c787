#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgboost {

/// Raw string-valued records as read from a CSV file with a header row.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t row_count() const { return rows.size(); }
    std::optional<std::size_t> find_column(std::string_view name) const;
    /// Throws MissingColumn when absent.
    std::size_t column(std::string_view name) const;

    Table select_rows(const std::vector<std::size_t>& indices) const;
};

Table parse_csv(std::istream& in);
Table read_csv(const std::filesystem::path& path);

/// RFC 4180 style: fields containing separators, quotes or newlines are quoted.
void write_csv(std::ostream& out, const Table& table);
std::string csv_escape(std::string_view field);

}  // namespace sgboost
