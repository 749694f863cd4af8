#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace gibbslab {

// Shortest round-trip representation; "nan"/"inf" for non-finite values.
std::string format_double(double value);

// Comma-separated, '.' decimal, '\n' line endings. Cells are written verbatim,
// so callers only pass numbers and simple identifiers.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(std::size_t value) { return cell(static_cast<long long>(value)); }
  CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
  void end_row();

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

void ensure_directory(const std::filesystem::path& dir);

}  // namespace gibbslab
