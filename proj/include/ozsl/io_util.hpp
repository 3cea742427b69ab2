#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ozsl {

/// Throws DataError if the file cannot be read.
std::string read_file(const std::filesystem::path& path);
/// Throws DataError if the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view content);

/// `%.17g`; parses back to exactly `v`.
std::string format_double(double v);
/// Whole-token parse; throws DataError mentioning `context` on failure.
double parse_double(std::string_view token, std::string_view context);
long long parse_int(std::string_view token, std::string_view context);

std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string> split_whitespace(std::string_view s);
std::string_view trim(std::string_view s);
std::string join_doubles(const double* values, std::size_t n, char sep);
std::vector<double> parse_doubles(std::string_view s, char sep, std::string_view context);

/// Splits text into lines, dropping a trailing '\r' from each.
std::vector<std::string_view> lines_of(std::string_view text);

}  // namespace ozsl
