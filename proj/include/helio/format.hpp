// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace helio {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Strict full-field parse; throws ConfigError on trailing garbage.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

std::string_view trim(std::string_view s);

/// Comma split without quoting support (none of our fields need it).
std::vector<std::string> split_csv(std::string_view line);

}  // namespace helio
