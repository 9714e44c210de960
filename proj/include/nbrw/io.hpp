#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace nbrw {

/// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite
/// values. Locale independent, so reruns produce identical bytes.
std::string format_double(double x);

/// A table written as CSV with "# key: value" metadata lines on top.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void meta(std::string key, std::string value);
  void row(std::vector<std::string> cells);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }

  std::string render() const;
  void write(const std::filesystem::path& file) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<std::string>> rows_;
};

/// Cell helpers.
std::string cell(double x);
std::string cell(std::int64_t x);
std::string cell(std::uint64_t x);
std::string cell(int x);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace nbrw
