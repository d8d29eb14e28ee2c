#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gazecluster::text {

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_record(std::string_view line);

/// Splits into lines, accepting \n and \r\n; strips a leading UTF-8 BOM.
std::vector<std::string_view> split_lines(std::string_view text);

std::string_view trim(std::string_view s) noexcept;

std::optional<double> parse_double(std::string_view s) noexcept;

/// Shortest representation that round-trips exactly.
std::string format_double(double v);

/// Quotes a CSV field if it contains a comma, quote or newline.
std::string csv_field(std::string_view s);

}  // namespace gazecluster::text
