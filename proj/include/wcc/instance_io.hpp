#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wcc/model.hpp"

namespace wcc {

/// Config-text syntax or validation failure, with the 1-based source line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line_number, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_number) + ": " +
                           message),
        line(line_number) {}
  int line;
};

/// One `key = value` entry of a config file.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// A bracketed `[name ...]` section (or the unnamed leading section).
struct ConfigSection {
  std::string name;  // empty for the leading section
  int line = 0;
  std::vector<ConfigEntry> entries;
};

/// Low-level reader for the flat key-value format shared by instance and
/// experiment files: `#` comments, blank lines, `key = value` entries,
/// `[section]` headers.
std::vector<ConfigSection> parse_config_sections(const std::string& text);

/// Strict numeric conversions with line-precise diagnostics.
double parse_number(const ConfigEntry& entry);
std::uint64_t parse_count(const ConfigEntry& entry);
std::vector<double> parse_number_list(const ConfigEntry& entry);

/// Instance file plus the optional [allocation] block used by validation.
struct InstanceFile {
  Instance instance;
  std::optional<Allocation> allocation;
};

/// Parses an instance in the documented key-value format. Values use the
/// reference-table units (P in pJ/cycle, F in GHz, B in kHz, sigma^2 in
/// nW) and are converted to SI on the way in. Unknown keys are rejected.
InstanceFile parse_instance_file(const std::string& text);
Instance parse_instance(const std::string& text);

/// Emits the same format back, full precision; parse(serialize(x)) is
/// semantically identical to x.
std::string serialize_instance(const Instance& instance);

}  // namespace wcc
