#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wigig {

/// Fixed-point text with trailing zeros removed ("1.5", "2", "-0.25").
std::string format_number(double v, int precision = 6);

/// Splits one CSV line on commas. No quoting support; none of our formats need it.
std::vector<std::string_view> split_fields(std::string_view line);

/// Writes `content` to a sibling temp file and renames it over `path`.
/// Throws std::runtime_error on I/O failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace wigig
