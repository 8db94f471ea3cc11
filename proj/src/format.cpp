#include "ldpkit/format.hpp"

#include <charconv>
#include <system_error>

#include "ldpkit/errors.hpp"

namespace ldp {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

std::string format_ext(ExtReal v) {
  if (v.is_pos_inf()) return "inf";
  if (v.is_neg_inf()) return "-inf";
  return format_double(v.value());
}

std::string ExtReal::to_string() const { return format_ext(*this); }

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

double parse_double(std::string_view token) {
  const auto t = trim(token);
  const char* begin = t.data();
  if (!t.empty() && t.front() == '+') ++begin;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError("not a finite number: '" + std::string(token) + "'");
  return v;
}

ExtReal parse_ext(std::string_view token) {
  const auto t = trim(token);
  if (t == "inf" || t == "+inf") return ExtReal::inf();
  if (t == "-inf") return ExtReal::neg_inf();
  return parse_double(t);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace ldp
