#pragma once

// Report plumbing: round-trip number formatting, RFC 4180 CSV and
// key-ordered JSON.

#include "json.hpp"

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace lossgain {

using Json = nlohmann::ordered_json;

// Shortest representation that parses back to the same double.
std::string format_number(double x);

// Quotes a field when it contains a comma, quote, CR or LF; embedded quotes are doubled.
std::string csv_escape(std::string_view field);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& fields);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

// Parses CSV text (quoted fields, CRLF or LF line ends) into rows of fields.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& value);

// JSON has no representation for non-finite numbers; they are written as strings.
Json json_number(double x);
Json json_array(const std::vector<double>& values);

}  // namespace lossgain
