#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "gwas/errors.hpp"

namespace gwas::tsv {

// Fixed formatting so that identical values always print identically.
inline std::string real(double value, int digits = 10) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, value);
  return buffer;
}

// Tab-separated table with '#'-prefixed metadata lines and one header line.
class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path), path_(path) {
    if (!out_) throw IoError("cannot write " + path.string());
  }

  void meta(std::string_view key, std::string_view value) { out_ << '#' << key << '=' << value << '\n'; }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << '\t';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  void row(std::initializer_list<std::string> fields) { row(std::vector<std::string>(fields)); }

  ~Writer() noexcept(false) {
    out_.flush();
    if (!out_ && std::uncaught_exceptions() == 0) throw IoError("failed writing " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

// Splits a TSV file into rows of fields, skipping '#' metadata and blank lines.
// The header, when present, is returned as the first row.
inline std::vector<std::vector<std::string>> read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace gwas::tsv
