#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace propsim {

// Shortest round-trip representation: printf "%.17g".
std::string format_double(double value);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a named column; throws ConfigError naming `context` when absent.
  std::size_t column(const std::string& name, const std::string& context) const;
  bool has_column(const std::string& name) const;
};

// Numeric CSV with a header line. Blank lines are skipped.
CsvTable read_csv(const std::string& path);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& cell(double value);
  CsvWriter& cell(const std::string& value);
  CsvWriter& cell(std::size_t value);
  void end_row();

  const std::string& text() const noexcept { return text_; }

 private:
  std::size_t columns_;
  std::size_t filled_ = 0;
  std::string text_;
};

// Writes the file, creating parent directories.
void write_file(const std::string& path, const std::string& contents);

std::string join_path(const std::string& dir, const std::string& name);

}  // namespace propsim
