#pragma once

// Minimal RFC 4180 reader/writer for the bundle's CSV files.

#include <string>
#include <string_view>
#include <vector>

namespace iecsi::csv {

struct Row {
  std::size_t line = 0;  // 1-based line the record starts on
  std::vector<std::string> fields;
};

// Accepts LF or CRLF; blank lines are skipped. Throws ParseError on an
// unterminated quoted field.
std::vector<Row> parse(std::string_view text, const std::string& source);

std::string format_row(const std::vector<std::string>& fields);

}  // namespace iecsi::csv
