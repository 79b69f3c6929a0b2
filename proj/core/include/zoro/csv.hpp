#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace zoro {

/// Shortest decimal that round-trips to the same double ("nan", "inf" for
/// the non-finite cases). Locale independent, so output is byte-stable.
std::string format_double(double value);

/// Writes via a temporary sibling file and rename. Throws IoError naming the
/// path on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Minimal CSV builder: header row first, LF line endings, no quoting (all
/// fields produced here are numbers or identifiers).
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row(std::vector<std::string> fields);
  std::size_t rows() const noexcept { return rows_; }
  const std::string& text() const noexcept { return text_; }

  void save(const std::filesystem::path& path) const { write_file_atomic(path, text_); }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

}  // namespace zoro
