#include "aisbench/csv.hpp"

#include "aisbench/error.hpp"
#include "aisbench/text.hpp"

#include <fstream>
#include <sstream>

namespace aisbench::csv {

Row split_line(std::string_view line, char delimiter) {
    Row out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

std::string quote(std::string_view field, char delimiter) {
    if (field.find_first_of(std::string{delimiter} + "\"\n\r") == std::string_view::npos) {
        return std::string{field};
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

Table Table::read(const std::filesystem::path& path, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return parse(in, path.string(), delimiter);
}

Table Table::parse(std::istream& in, const std::string& source_name, char delimiter) {
    Table t;
    t.source_ = source_name;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!have_header) {
            if (line.empty()) {
                continue;
            }
            t.header_ = split_line(line, delimiter);
            for (std::size_t i = 0; i < t.header_.size(); ++i) {
                std::string name{text::trim(t.header_[i])};
                if (i == 0 && !name.empty() && name.front() == '#') {
                    name = std::string{text::trim(std::string_view{name}.substr(1))};
                }
                t.header_[i] = name;
                t.index_.emplace(name, i);
            }
            have_header = true;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        t.rows_.push_back(split_line(line, delimiter));
    }
    if (!have_header) {
        throw DataError(source_name + ": missing header row");
    }
    return t;
}

std::optional<std::size_t> Table::find(std::string_view column) const {
    const auto it = index_.find(std::string{column});
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t Table::require(std::string_view column) const {
    if (auto i = find(column)) {
        return *i;
    }
    throw DataError(source_ + ": missing required column '" + std::string{column} + "'");
}

Writer::Writer(Row header) : header_(std::move(header)) {}

void Writer::add(Row row) { rows_.push_back(std::move(row)); }

std::string Writer::str() const {
    std::string out;
    auto emit = [&out](const Row& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) {
                out.push_back(',');
            }
            out += quote(row[i]);
        }
        out.push_back('\n');
    };
    emit(header_);
    for (const auto& r : rows_) {
        emit(r);
    }
    return out;
}

void Writer::write(const std::filesystem::path& path) const {
    text::write_file(path, str());
}

} // namespace aisbench::csv
