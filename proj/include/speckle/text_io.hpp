#ifndef SPECKLE_TEXT_IO_HPP
#define SPECKLE_TEXT_IO_HPP

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace speckle
{

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// RFC 4180 rows: fields containing a comma, quote or line break are quoted.
class CsvWriter
{
public:
  explicit CsvWriter(std::ostream& os) : mOs(os) {}

  void row(const std::vector<std::string>& fields);

private:
  std::ostream& mOs;
};

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// Write to a sibling temporary file, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

} // namespace speckle

#endif // SPECKLE_TEXT_IO_HPP
