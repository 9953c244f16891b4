#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fogcache::csv {

// Splits one CSV line into fields. Double-quoted fields may contain commas
// and doubled quotes; embedded newlines are not supported.
std::vector<std::string> split_line(std::string_view line);

// Quotes a field only when it contains a comma, quote or leading/trailing
// space.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);
std::optional<std::uint64_t> parse_uint(std::string_view text);

std::string_view trim(std::string_view text);

// Line reader that strips '\r' and skips blank lines. Comment lines
// starting with '#' are skipped when `skip_comments` is set.
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path, bool skip_comments = false);

  // Next row's fields, or nullopt at end of file.
  std::optional<std::vector<std::string>> next();

  // 1-based number of the line most recently returned.
  std::size_t line_number() const { return line_number_; }

 private:
  std::ifstream in_;
  std::size_t line_number_ = 0;
  bool skip_comments_;
};

// Opens `path` for writing and throws IoError when that fails.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace fogcache::csv
