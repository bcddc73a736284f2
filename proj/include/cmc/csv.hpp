#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cmc::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t column(std::string_view name) const;  // throws DataError if absent
};

// Plain comma-separated text: no quoting, '.' decimal point, optional trailing
// '\r' stripped. Blank lines are skipped. Every row must match the header width.
Table read(const std::filesystem::path& path);
Table parse(std::string_view text, std::string_view source = "<memory>");

std::vector<std::string> split(std::string_view line, char sep = ',');

double parse_double(std::string_view s, std::string_view context);
long parse_int(std::string_view s, std::string_view context);

// Shortest representation that round-trips to the same double.
std::string format_double(double v);
// Fixed-point with the given number of decimals.
std::string format_fixed(double v, int decimals);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace cmc::csv
