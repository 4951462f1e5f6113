#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace antispoof::detail {

// Doubles are serialized with 17 significant digits everywhere so every text
// artifact round-trips bit-exactly and regenerated files are byte-identical.
inline std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

// Splits off `count` comma-separated fields from the right of `line`; the
// remainder (which may itself contain commas, e.g. a file path) becomes the
// first element. Returns empty vector if fewer than `count` commas exist.
inline std::vector<std::string> split_right(const std::string& line, std::size_t count) {
  std::vector<std::string> fields(count + 1);
  std::string::size_type end = line.size();
  for (std::size_t k = 0; k < count; ++k) {
    const auto pos = line.rfind(',', end == 0 ? 0 : end - 1);
    if (pos == std::string::npos || pos >= end) return {};
    fields[count - k] = line.substr(pos + 1, end - pos - 1);
    end = pos;
  }
  fields[0] = line.substr(0, end);
  return fields;
}

}  // namespace antispoof::detail
