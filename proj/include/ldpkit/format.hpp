#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ldpkit/ext_real.hpp"

namespace ldp {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);
std::string format_ext(ExtReal v);

/// Strict double parse of the whole token (leading/trailing blanks allowed).
double parse_double(std::string_view token);
/// Accepts a double or inf/+inf/-inf.
ExtReal parse_ext(std::string_view token);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace ldp
