/*
   Copyright 2026 The lambdaflow Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Tabular serialisation shared by every output kind. Floats are printed with
// 17 significant digits, so CSV and JSON both round-trip doubles exactly.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace lambdaflow {

enum class Format { csv, json };

inline std::string_view to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

inline Format format_from_string(std::string_view s)
{
    if (s == "csv")
        return Format::csv;
    if (s == "json")
        return Format::json;
    throw ValidationError("unknown format '" + std::string(s) + "' (expected csv or json)");
}

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    bool operator==(const Table&) const = default;
};

inline std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string format_cell(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c))
        return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c))
        return std::to_string(*i);
    return std::get<std::string>(c);
}

inline void write_csv(std::ostream& os, const Table& t)
{
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << (c ? "," : "") << t.columns[c];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << format_cell(row[c]);
        os << '\n';
    }
}

inline nlohmann::json to_json(const Table& t)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t c = 0; c < row.size(); ++c)
            std::visit([&](const auto& v) { obj[t.columns[c]] = v; }, row[c]);
        rows.push_back(std::move(obj));
    }
    return rows;
}

inline void write_json(std::ostream& os, const Table& t)
{
    os << to_json(t).dump(1) << '\n';
}

/// Parses one CSV field: integer, then double, then plain string.
inline Cell parse_cell(std::string_view s)
{
    if (s.empty())
        return std::string{};
    std::int64_t i{};
    auto [pi, ei] = std::from_chars(s.data(), s.data() + s.size(), i);
    if (ei == std::errc{} && pi == s.data() + s.size())
        return (i == 0 && s.front() == '-') ? Cell{-0.0} : Cell{i};
    double d{};
    auto [pd, ed] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ed == std::errc{} && pd == s.data() + s.size())
        return d;
    return std::string(s);
}

inline Table read_csv(std::istream& is)
{
    Table t;
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> out;
        std::string field;
        std::istringstream ss(l);
        while (std::getline(ss, field, ','))
            out.push_back(field);
        if (!l.empty() && l.back() == ',')
            out.emplace_back();
        return out;
    };
    if (!std::getline(is, line))
        throw ParseError("CSV input is empty");
    t.columns = split(line);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto fields = split(line);
        if (fields.size() != t.columns.size())
            throw ParseError("CSV line " + std::to_string(lineno) + ": expected "
                             + std::to_string(t.columns.size()) + " fields");
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (const auto& f : fields)
            row.push_back(parse_cell(f));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table read_csv_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    return read_csv(in);
}

/// Writes a table to `path` in the given format; LF line endings.
inline void emit(const Table& t, Format format, const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    if (format == Format::csv)
        write_csv(out, t);
    else
        write_json(out, t);
    out.flush();
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace lambdaflow
