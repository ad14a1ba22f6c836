#include "tcc/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

namespace tcc {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), end};
}

void write_csv_row(std::ostream& os, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ',';
    os << format_double(values[i]);
  }
  os << '\n';
}

void write_csv_header(std::ostream& os, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) os << ',';
    os << names[i];
  }
  os << '\n';
}

void write_csv_comment(std::ostream& os, std::string_view text) {
  if (!text.empty()) os << "# " << text << '\n';
}

std::vector<std::string> vec_column_names(std::string_view prefix, long rows, long cols) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(rows * cols));
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) {
      names.push_back(std::string(prefix) + "_" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  return names;
}

}  // namespace tcc
