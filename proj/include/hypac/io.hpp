#pragma once

#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "hypac/config.hpp"

namespace hypac {

using Json = nlohmann::json;

/// Shortest round-trip text for a double ("nan", "inf", "-inf" for non-finite).
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  template <class... Ts>
  void add(const Ts&... cells) {
    rows.push_back({cell(cells)...});
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  template <class I>
  static std::string cell(I v) requires std::is_integral_v<I> { return std::to_string(v); }
};

/// Comma separated, header row, LF line endings; cells with commas or quotes are quoted.
void write_csv(const std::string& path, const CsvTable& t);
/// Pretty-printed with sorted keys and a trailing newline.
void write_json(const std::string& path, const Json& j);

/// Config hash (FNV-1a of the canonical config, hex), versions, timestamp.
Json make_manifest(const RunConfig& cfg, const std::string& command);

}  // namespace hypac
