#pragma once

// Tab-separated tables shared by the score, manifest and export formats.
//
// Escaping: inside a field, backslash, tab, newline and carriage return are
// written as \\, \t, \n and \r. Every other byte is literal. The first line
// is the header; lines starting with '#' and blank lines are skipped on read.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cisim/common/error.hpp"

namespace cisim {

class TsvError : public Error {
 public:
  using Error::Error;
};

std::string tsv_escape(std::string_view field);
std::string tsv_unescape(std::string_view field);

class TsvTable {
 public:
  TsvTable() = default;
  explicit TsvTable(std::vector<std::string> header);

  static TsvTable parse(std::istream& in);
  static TsvTable read_file(const std::string& path);

  void write(std::ostream& out) const;
  void write_file(const std::string& path) const;

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t require_column(std::string_view name) const;
  bool has_column(std::string_view name) const { return column(name).has_value(); }

  void add_row(std::vector<std::string> row);

  /// Field lookup by column name; empty string when the column is absent.
  const std::string& get(std::size_t row, std::string_view name) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace cisim
