#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace chronoslit {

using Json = nlohmann::ordered_json;

/// "%.12e"
std::string format_real(double value);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

/// CSV table: a '#'-prefixed units line, a column-name line, then rows.
/// Cells are preformatted strings; LF line endings.
class CsvTable {
 public:
  CsvTable(std::string units_comment, std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::string units_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

enum class RealFormat {
  scientific,  // %.12e
  round_trip,  // shortest text that parses back to the same double
};

/// JSON text with two-space indentation; floating-point numbers use `format`,
/// integers, strings and booleans print as usual.
std::string dump_json(const Json& value, RealFormat format = RealFormat::scientific);

}  // namespace chronoslit
