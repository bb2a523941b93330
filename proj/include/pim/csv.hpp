#pragma once

#include "pim/common.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pim::csv {

/// 17 significant digits; round-trips every finite double.
std::string format_real(double value);

/// Strict parse of a whole field as a double. Throws ParseError.
double parse_real(std::string_view field, std::string_view context = {});
long long parse_integer(std::string_view field, std::string_view context = {});

std::vector<std::string_view> split(std::string_view line, char separator = ',');
std::string_view trim(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Splits text into lines, dropping a trailing '\r' on each.
std::vector<std::string_view> lines(std::string_view text);

/// Loads a single column of reals (one per line, optional non-numeric header).
Vector read_column(const std::filesystem::path& path);

} // namespace pim::csv
