#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace engage::csv {

// RFC 4180-ish reader: quoted fields, doubled quotes, embedded delimiters and
// newlines, CRLF tolerant. Delimiter is configurable.
class Reader {
 public:
  explicit Reader(std::istream& in, char delimiter = ',');

  // Reads one record into `out`. Returns false at end of stream.
  // Blank records (no fields at all) are skipped.
  bool next_row(std::vector<std::string>& out);

  // 1-based physical line on which the last returned record started.
  std::size_t row_line() const { return row_line_; }

 private:
  std::istream& in_;
  char delimiter_;
  std::size_t line_ = 1;
  std::size_t row_line_ = 0;
};

std::string escape_field(const std::string& field, char delimiter = ',');
void write_row(std::ostream& out, std::span<const std::string> fields,
               char delimiter = ',');

// Shortest round-trip decimal form of a double ("" stays "" for blanks).
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& what);

}  // namespace engage::csv
