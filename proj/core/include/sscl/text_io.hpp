#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sscl {

/// Shortest-safe text form of a double with the given significant digits
/// ("%.17g"-style, locale independent).
std::string format_double(double value, int significant_digits = 17);

/// Parses a full token as a double; throws DataError on trailing junk.
double parse_double(std::string_view token);

std::vector<std::string_view> split_commas(std::string_view line);
std::string_view trim(std::string_view s);

/// Writes `contents` to a sibling temp file and renames it over `path`, so a
/// reader never sees a truncated file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace sscl
