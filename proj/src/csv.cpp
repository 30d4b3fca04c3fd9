#include "dbtune/csv.hpp"

#include <charconv>
#include <sstream>

#include "dbtune/errors.hpp"

namespace dbtune {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::string& header)
    : path_(path), out_(path, std::ios::binary) {
  if (!out_) {
    throw IoError("cannot open for writing: " + path.string());
  }
  out_ << header << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) {
    throw IoError("write failed: " + path_.string());
  }
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) {
    throw IoError("write failed: " + path_.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failed: " + path.string());
  }
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open for writing: " + path.string());
  }
  out << text;
  out.close();
  if (out.fail()) {
    throw IoError("write failed: " + path.string());
  }
}

}  // namespace dbtune
