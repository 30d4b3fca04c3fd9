#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace dbtune {

/// Shortest decimal form of `v` that parses back to the same double
/// (std::to_chars). Keeps CSV output compact, exact and byte-stable.
std::string format_double(double v);

std::vector<std::string> split_csv_line(const std::string& line);

/// Line-oriented CSV writer. The header is written on construction; open or
/// write failures raise IoError naming the path.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header);
  void row(const std::vector<std::string>& cells);
  void close();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Whole-file read, IoError on failure.
std::string read_file(const std::filesystem::path& path);

/// Whole-file write, IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dbtune
