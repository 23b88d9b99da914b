#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aisbench::csv {

using Row = std::vector<std::string>;

/// Splits one CSV record. Handles RFC 4180 quoting; a quoted field may not
/// span lines (none of our inputs need that).
Row split_line(std::string_view line, char delimiter = ',');

/// Quotes a field only when it contains the delimiter, a quote, or a newline.
std::string quote(std::string_view field, char delimiter = ',');

/// An in-memory table with a header row. Column lookup is by exact name after
/// trimming whitespace and a leading '#' (the DMA export prefixes its header).
class Table {
public:
    static Table read(const std::filesystem::path& path, char delimiter = ',');
    static Table parse(std::istream& in, const std::string& source_name, char delimiter = ',');

    [[nodiscard]] const Row& header() const { return header_; }
    [[nodiscard]] const std::vector<Row>& rows() const { return rows_; }
    [[nodiscard]] std::size_t size() const { return rows_.size(); }

    [[nodiscard]] std::optional<std::size_t> find(std::string_view column) const;
    /// Throws DataError naming the column when absent.
    [[nodiscard]] std::size_t require(std::string_view column) const;

private:
    std::string source_;
    Row header_;
    std::vector<Row> rows_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Accumulates rows and renders them with '\n' line endings.
class Writer {
public:
    explicit Writer(Row header);

    void add(Row row);
    [[nodiscard]] std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    Row header_;
    std::vector<Row> rows_;
};

} // namespace aisbench::csv
