#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgdirac {

/// File-system failures (unreadable or unwritable paths).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest text that is still a lossless representation: 17 significant
/// digits, '.' decimal separator, independent of the global locale.
std::string format_real(double value);
std::string format_integer(std::int64_t value);

/// In-memory CSV document. Every row must have exactly one field per column.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 style text with a header row and LF line endings. Fields that
/// contain a comma, quote or line break are quoted.
std::string format_csv(const CsvTable& table);
void write_csv(const CsvTable& table, const std::filesystem::path& path);

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

double parse_real(const std::string& field);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qgdirac
