#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semcmg::csv {

/// Shortest round-trip decimal representation, independent of locale.
std::string format(double value);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view line, char sep = ',');

std::optional<double> parse_double(std::string_view field);
std::optional<long long> parse_int(std::string_view field);

/// True for blank lines and '#' comments.
bool is_skippable(std::string_view line);

}  // namespace semcmg::csv
