#include "engage/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "engage/errors.hpp"

namespace engage::csv {

Reader::Reader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

bool Reader::next_row(std::vector<std::string>& out) {
  out.clear();
  std::string field;
  bool in_quotes = false;
  bool saw_any = false;
  row_line_ = line_;

  int ci;
  while ((ci = in_.get()) != std::char_traits<char>::eof()) {
    const char c = static_cast<char>(ci);
    if (in_quotes) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_;
        field += c;
      }
      saw_any = true;
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      saw_any = true;
    } else if (c == delimiter_) {
      out.push_back(std::move(field));
      field.clear();
      saw_any = true;
    } else if (c == '\r') {
      // consumed with the following '\n' (or alone, treated as line end)
      if (in_.peek() == '\n') in_.get();
      ++line_;
      if (!saw_any) {  // blank line: skip, keep scanning
        row_line_ = line_;
        continue;
      }
      out.push_back(std::move(field));
      return true;
    } else if (c == '\n') {
      ++line_;
      if (!saw_any) {
        row_line_ = line_;
        continue;
      }
      out.push_back(std::move(field));
      return true;
    } else {
      field += c;
      saw_any = true;
    }
  }
  if (in_quotes) {
    throw InputError("unterminated quoted field starting near line " +
                     std::to_string(row_line_));
  }
  if (!saw_any) return false;
  out.push_back(std::move(field));
  return true;
}

std::string escape_field(const std::string& field, char delimiter) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == delimiter || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, std::span<const std::string> fields,
               char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << delimiter;
    out << escape_field(fields[i], delimiter);
  }
  out << '\n';
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw InputError("bad numeric value for " + what + ": \"" + text + "\"");
  }
  return v;
}

}  // namespace engage::csv
