#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fidget {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

// Parses a finite or "nan"/empty cell; returns false on garbage.
bool parse_double(std::string_view s, double& out);

// Shortest representation that round-trips.
std::string format_double(double v);
// Fixed-point with the given number of decimals.
std::string format_fixed(double v, int decimals);

// 64-bit FNV-1a, used for schema and content hashes.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace fidget
