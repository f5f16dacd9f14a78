#pragma once
// Small helpers shared by the text readers and writers.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kgenrich {

// Raised when a required input file cannot be opened.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

std::vector<std::string_view> split_fields(std::string_view line, char sep = '\t');
std::string_view trim(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);

// Shortest form that round-trips is not required; 17 significant digits is.
std::string format_real(double value);
double parse_real(std::string_view text);
std::uint64_t parse_count(std::string_view text);

}  // namespace kgenrich
