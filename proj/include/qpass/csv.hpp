#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qpass::csv {

/// Splits one CSV line. Double-quoted fields may contain commas; `""` is a literal quote.
std::vector<std::string> split_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote or newline.
std::string quote(std::string_view field);

/// Reads the next non-empty line, stripping a trailing '\r'. Counts lines in `line_no`.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no);

std::optional<double> to_double(std::string_view s);
std::optional<long> to_long(std::string_view s);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace qpass::csv
