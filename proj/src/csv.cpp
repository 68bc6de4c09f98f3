#include "csv.hpp"

#include "iecsi/errors.hpp"

namespace iecsi::csv {

std::vector<Row> parse(std::string_view text, const std::string& source) {
  std::vector<Row> rows;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    Row row;
    row.line = line;
    std::string field;
    bool in_quotes = false;
    bool record_done = false;
    bool any = false;
    while (i < text.size() && !record_done) {
      const char c = text[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          in_quotes = false;
        } else {
          if (c == '\n') ++line;
          field += c;
        }
        ++i;
        continue;
      }
      switch (c) {
        case '"':
          in_quotes = true;
          any = true;
          break;
        case ',':
          row.fields.push_back(std::move(field));
          field.clear();
          any = true;
          break;
        case '\r':
          break;
        case '\n':
          record_done = true;
          ++line;
          break;
        default:
          field += c;
          any = true;
      }
      ++i;
    }
    if (in_quotes) throw ParseError(source + ":" + std::to_string(row.line), "unterminated quote");
    if (!any && field.empty()) continue;
    row.fields.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out += f;
      continue;
    }
    out += '"';
    for (char c : f) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  }
  out += '\n';
  return out;
}

}  // namespace iecsi::csv
