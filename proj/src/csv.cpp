#include "qgdirac/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qgdirac {

std::string format_real(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buffer{};
    auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value,
                                   std::chars_format::general, 17);
    if (ec != std::errc{}) throw std::runtime_error("format_real: conversion failed");
    return std::string(buffer.data(), end);
}

std::string format_integer(std::int64_t value)
{
    return std::to_string(value);
}

namespace {

bool needs_quotes(const std::string& field)
{
    return field.find_first_of(",\"\r\n") != std::string::npos;
}

void append_field(std::string& out, const std::string& field)
{
    if (!needs_quotes(field)) {
        out += field;
        return;
    }
    out += '"';
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
}

void append_row(std::string& out, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        append_field(out, fields[i]);
    }
    out += '\n';
}

}  // namespace

std::string format_csv(const CsvTable& table)
{
    if (table.columns.empty()) throw std::invalid_argument("format_csv: no columns");
    std::string out;
    append_row(out, table.columns);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != table.columns.size())
            throw std::invalid_argument("format_csv: row " + std::to_string(r) +
                                        " does not match the schema");
        append_row(out, table.rows[r]);
    }
    return out;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path)
{
    write_text_file(path, format_csv(table));
}

CsvTable parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        if (ch == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (ch == ',') {
            end_field();
        } else if (ch == '\n') {
            end_record();
        } else if (ch == '\r') {
            // tolerated before '\n'
        } else {
            field += ch;
            field_started = true;
        }
    }
    if (quoted) throw std::invalid_argument("parse_csv: unterminated quoted field");
    if (field_started || !record.empty()) end_record();

    if (records.empty()) throw std::invalid_argument("parse_csv: missing header row");
    CsvTable table;
    table.columns = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.columns.size())
            throw std::invalid_argument("parse_csv: record " + std::to_string(r) +
                                        " has the wrong number of fields");
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    return parse_csv(read_text_file(path));
}

double parse_real(const std::string& field)
{
    if (field == "nan") return std::nan("");
    if (field == "inf") return HUGE_VAL;
    if (field == "-inf") return -HUGE_VAL;
    double value = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw std::invalid_argument("not a real number: '" + field + "'");
    return value;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace qgdirac
