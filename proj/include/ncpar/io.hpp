#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ncpar/errors.hpp"

namespace ncpar::io {

/// 17 significant digits: enough to round-trip any double.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Minimal CSV builder; the header is fixed at construction.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) : columns_(header.size()) {
    row_strings(header);
  }

  CsvWriter& row(std::initializer_list<std::string> cells) {
    row_strings(std::vector<std::string>(cells));
    return *this;
  }

  CsvWriter& row_strings(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
      throw Error(ErrorCode::ConfigError, "io", "csv row has wrong number of columns");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
    return *this;
  }

  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

/// Write via a temporary file in the same directory and rename over the target.
inline void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ConfigError, "io", "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::ConfigError, "io", "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "io", "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace ncpar::io
