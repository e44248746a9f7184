#include "bragg/table.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bragg/errors.hpp"
#include "bragg/hash.hpp"

namespace bragg {

ResultTable::ResultTable(std::string title, std::vector<Column> columns)
    : title_(std::move(title)), columns_(std::move(columns)) {
  if (columns_.empty()) throw ParameterError("table needs at least one column");
  for (const auto& c : columns_)
    if (c.name.empty() || c.unit.empty() || c.name.find_first_of(" \t\n") != std::string::npos)
      throw ParameterError("column names and units must be non-empty without whitespace");
}

void ResultTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(exact(v));
  add_text_row(std::move(cells));
}

void ResultTable::add_text_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size())
    throw ParameterError("row has " + std::to_string(cells.size()) + " cells, table has " +
                         std::to_string(columns_.size()) + " columns");
  rows_.push_back(std::move(cells));
}

void ResultTable::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : meta_)
    if (k == key) {
      v = value;
      return;
    }
  meta_.emplace_back(key, value);
}

std::size_t ResultTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  throw ParameterError("no column '" + name + "'");
}

double ResultTable::number(std::size_t row, std::size_t col) const {
  return std::strtod(rows_.at(row).at(col).c_str(), nullptr);
}

std::string ResultTable::render() const {
  std::ostringstream s;
  s << "# table: " << title_ << '\n';
  s << "# manifest: " << (manifest_hash_.empty() ? "none" : manifest_hash_) << '\n';
  for (const auto& [k, v] : meta_) s << "# " << k << ": " << v << '\n';
  s << "# units:";
  for (const auto& c : columns_) s << ' ' << c.unit;
  s << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) s << (i ? "\t" : "") << columns_[i].name;
  s << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "\t" : "") << row[i];
    s << '\n';
  }
  return s.str();
}

void ResultTable::write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << render();
}

ResultTable ResultTable::parse(const std::string& text) {
  ResultTable t;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> units;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) {
        if (line.rfind("# units:", 0) == 0) {
          std::istringstream u(line.substr(8));
          for (std::string x; u >> x;) units.push_back(x);
        }
        continue;
      }
      const std::string key = line.substr(2, colon - 2), value = line.substr(colon + 2);
      if (key == "table") {
        t.title_ = value;
      } else if (key == "manifest") {
        t.manifest_hash_ = value == "none" ? "" : value;
      } else if (key == "units") {
        std::istringstream u(value);
        for (std::string x; u >> x;) units.push_back(x);
      } else {
        t.meta_.emplace_back(key, value);
      }
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream fields(line);
    for (std::string cell; std::getline(fields, cell, '\t');) cells.push_back(cell);
    if (!have_header) {
      if (cells.size() != units.size()) throw ConfigError("table header and units disagree");
      for (std::size_t i = 0; i < cells.size(); ++i) t.columns_.push_back({cells[i], units[i]});
      have_header = true;
    } else {
      t.add_text_row(std::move(cells));
    }
  }
  if (!have_header) throw ConfigError("table has no column header");
  return t;
}

ResultTable ResultTable::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace bragg
