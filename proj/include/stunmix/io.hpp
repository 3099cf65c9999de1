#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stunmix::io {

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a truncated file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);
void append_double(std::string& out, double value);

double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view text);

/// Iterates lines of `text`, tolerating a trailing newline and CRLF endings.
std::vector<std::string_view> lines(std::string_view text);

}  // namespace stunmix::io
