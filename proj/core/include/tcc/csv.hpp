#pragma once

// Locale-independent numeric formatting for CSV and JSON emitters.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tcc {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// Writes one comma-separated row terminated by '\n'.
void write_csv_row(std::ostream& os, const std::vector<double>& values);
void write_csv_header(std::ostream& os, const std::vector<std::string>& names);

/// Writes "# <text>\n" when text is non-empty.
void write_csv_comment(std::ostream& os, std::string_view text);

/// Column names prefix_ij for vec() order (column-major) of a rows x cols matrix.
std::vector<std::string> vec_column_names(std::string_view prefix, long rows, long cols);

}  // namespace tcc
