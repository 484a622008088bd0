#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace nehs::io {

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Splits on `sep`, keeping empty fields.
std::vector<std::string_view> split(std::string_view text, char sep);

// Splits on runs of ASCII whitespace, dropping empty fields.
std::vector<std::string_view> split_whitespace(std::string_view text);

// Drops a trailing '\r' left by CRLF files.
std::string_view chomp(std::string_view line);

// Parses the whole of `text` as a double; false on any trailing junk.
bool parse_double(std::string_view text, double& out);
bool parse_size(std::string_view text, std::size_t& out);

}  // namespace nehs::io
