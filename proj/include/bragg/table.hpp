#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace bragg {

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless
};

/// Tab-delimited table with a '#'-prefixed provenance header. Numbers are
/// written with 17 significant digits so they read back exactly.
class ResultTable {
 public:
  ResultTable() = default;
  ResultTable(std::string title, std::vector<Column> columns);

  void add_row(const std::vector<double>& values);
  void add_text_row(std::vector<std::string> cells);
  void set_meta(const std::string& key, const std::string& value);
  void set_manifest_hash(std::string hash) { manifest_hash_ = std::move(hash); }

  const std::string& title() const { return title_; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  const std::string& manifest_hash() const { return manifest_hash_; }
  const std::vector<std::pair<std::string, std::string>>& meta() const { return meta_; }
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;

  std::string render() const;
  void write(const std::filesystem::path& path) const;
  static ResultTable parse(const std::string& text);
  static ResultTable read(const std::filesystem::path& path);

 private:
  std::string title_;
  std::vector<Column> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::string manifest_hash_;
};

}  // namespace bragg
