#include "cisim/common/tsv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cisim {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(tsv_unescape(std::string_view(line).substr(start)));
      break;
    }
    fields.push_back(tsv_unescape(std::string_view(line).substr(start, tab - start)));
    start = tab + 1;
  }
  return fields;
}

const std::string kEmpty;

}  // namespace

std::string tsv_escape(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (char c : field) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tsv_unescape(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] != '\\' || i + 1 == field.size()) {
      out += field[i];
      continue;
    }
    switch (field[++i]) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      default:
        out += '\\';
        out += field[i];
    }
  }
  return out;
}

TsvTable::TsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

TsvTable TsvTable::parse(std::istream& in) {
  TsvTable table;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_line(line);
    if (!have_header) {
      table.header_ = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header_.size()) {
      throw TsvError("line " + std::to_string(line_no) + ": expected " +
                     std::to_string(table.header_.size()) + " fields, got " +
                     std::to_string(fields.size()));
    }
    table.rows_.push_back(std::move(fields));
  }
  if (!have_header) throw TsvError("table has no header line");
  return table;
}

TsvTable TsvTable::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open table: " + path);
  try {
    return parse(in);
  } catch (const TsvError& e) {
    throw TsvError(path + ": " + e.what());
  }
}

void TsvTable::write(std::ostream& out) const {
  auto emit = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << '\t';
      out << tsv_escape(fields[i]);
    }
    out << '\n';
  };
  emit(header_);
  for (const auto& row : rows_) emit(row);
}

void TsvTable::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write table: " + path);
  write(out);
  if (!out) throw IoError("write failed: " + path);
}

std::optional<std::size_t> TsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t TsvTable::require_column(std::string_view name) const {
  if (auto idx = column(name)) return *idx;
  throw TsvError("missing required column '" + std::string(name) + "'");
}

void TsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw TsvError("row has " + std::to_string(row.size()) + " fields, header has " +
                   std::to_string(header_.size()));
  }
  rows_.push_back(std::move(row));
}

const std::string& TsvTable::get(std::size_t row, std::string_view name) const {
  const auto idx = column(name);
  if (!idx) return kEmpty;
  return rows_.at(row)[*idx];
}

}  // namespace cisim
