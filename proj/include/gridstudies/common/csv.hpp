#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gridstudies::csv {

/// Locale-independent number formatting used for every tabular output.
std::string format(double value, int significant_digits = 15);

/// Fixed-point formatting ("%.<decimals>f").
std::string fixed(double value, int decimals);

std::vector<std::string> split_line(std::string_view line, char delimiter = ',');

/// Parses a number and throws ParseError naming `line_number` on failure.
double parse_double(std::string_view text, std::size_t line_number);
long long parse_int(std::string_view text, std::size_t line_number);

struct Table {
    std::vector<std::string> header;
    /// Each row paired with its 1-based line number in the source file.
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
};

/// Reads a comma-separated file with a header row. An empty file is an
/// error; a header-only file yields zero rows. Rows whose field count
/// differs from the header raise ParseError.
Table read_table(const std::filesystem::path& path);

/// Writes header and rows joined by commas, '\n' line endings.
void write_table(const std::filesystem::path& path,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

}  // namespace gridstudies::csv
