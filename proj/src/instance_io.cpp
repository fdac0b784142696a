#include "wcc/instance_io.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

namespace wcc {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<ConfigSection> parse_config_sections(const std::string& text) {
  std::vector<ConfigSection> sections;
  sections.push_back({"", 0, {}});

  std::istringstream stream(text);
  std::string raw;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos)
      raw.erase(hash);
    const std::string content = trim(raw);
    if (content.empty()) continue;

    if (content.front() == '[') {
      if (content.back() != ']')
        throw ParseError(line, "unterminated section header");
      sections.push_back({trim(content.substr(1, content.size() - 2)), line,
                          {}});
      continue;
    }

    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw ParseError(line, "expected `key = value`, got: " + content);
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty()) throw ParseError(line, "empty key");
    if (value.empty()) throw ParseError(line, "empty value for " + key);
    sections.back().entries.push_back({key, value, line});
  }
  return sections;
}

double parse_number(const ConfigEntry& entry) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(entry.value.c_str(), &end);
  if (end != entry.value.c_str() + entry.value.size() || errno == ERANGE)
    throw ParseError(entry.line,
                     entry.key + " is not a number: " + entry.value);
  return value;
}

std::uint64_t parse_count(const ConfigEntry& entry) {
  const double value = parse_number(entry);
  const auto n = static_cast<std::uint64_t>(value);
  if (value < 0 || static_cast<double>(n) != value)
    throw ParseError(entry.line, entry.key +
                                     " must be a non-negative integer: " +
                                     entry.value);
  return n;
}

std::vector<double> parse_number_list(const ConfigEntry& entry) {
  std::vector<double> values;
  std::string item;
  std::istringstream stream(entry.value);
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ParseError(entry.line, entry.key + " has an empty list item");
    ConfigEntry sub{entry.key, item, entry.line};
    values.push_back(parse_number(sub));
  }
  if (values.empty())
    throw ParseError(entry.line, entry.key + " must list at least one value");
  return values;
}

namespace {

// Unit scales from the config-file keys to SI.
constexpr double kPicojoule = 1e-12;
constexpr double kGigahertz = 1e9;
constexpr double kKilohertz = 1e3;
constexpr double kNanowatt = 1e-9;

double positive_number(const ConfigEntry& entry) {
  const double value = parse_number(entry);
  if (!(value > 0))
    throw ParseError(entry.line, entry.key + " must be positive");
  return value;
}

struct SeenKeys {
  std::map<std::string, int> lines;
  void mark(const ConfigEntry& entry) {
    const auto [it, fresh] = lines.emplace(entry.key, entry.line);
    if (!fresh)
      throw ParseError(entry.line, "duplicate key " + entry.key +
                                       " (first on line " +
                                       std::to_string(it->second) + ")");
  }
};

Allocation parse_allocation_section(const ConfigSection& section,
                                    std::size_t node_count) {
  Allocation allocation;
  SeenKeys seen;
  for (const ConfigEntry& entry : section.entries) {
    seen.mark(entry);
    if (entry.key == "l_bits") {
      allocation.load_bits = parse_number_list(entry);
    } else if (entry.key == "t_s") {
      allocation.shuffle_time_s = parse_number_list(entry);
    } else {
      throw ParseError(entry.line,
                       "unknown key in [allocation]: " + entry.key);
    }
  }
  if (allocation.load_bits.size() != node_count ||
      allocation.shuffle_time_s.size() != node_count)
    throw ParseError(section.line,
                     "[allocation] needs l_bits and t_s with one value per "
                     "node");
  return allocation;
}

}  // namespace

InstanceFile parse_instance_file(const std::string& text) {
  const std::vector<ConfigSection> sections = parse_config_sections(text);

  InstanceFile out;
  SystemConfig& config = out.instance.config;
  config.bandwidth_hz = 15 * kKilohertz;  // reference-table defaults
  config.noise_power_w = 1 * kNanowatt;
  config.snr_gap = 1;
  config.local_data_bits = 0;

  bool have_k = false, have_l = false, have_t = false, have_tau = false;
  SeenKeys seen;
  for (const ConfigEntry& entry : sections.front().entries) {
    seen.mark(entry);
    if (entry.key == "K") {
      config.node_count = static_cast<std::size_t>(parse_count(entry));
      if (config.node_count < 1)
        throw ParseError(entry.line, "K must be >= 1");
      have_k = true;
    } else if (entry.key == "L_bits") {
      config.dataset_bits = positive_number(entry);
      have_l = true;
    } else if (entry.key == "D_bits") {
      config.local_data_bits = parse_number(entry);
      if (config.local_data_bits < 0)
        throw ParseError(entry.line, "D_bits must be non-negative");
    } else if (entry.key == "T_bits") {
      config.intermediate_bits = positive_number(entry);
      have_t = true;
    } else if (entry.key == "tau_s") {
      config.latency_s = positive_number(entry);
      have_tau = true;
    } else if (entry.key == "B_kHz") {
      config.bandwidth_hz = positive_number(entry) * kKilohertz;
    } else if (entry.key == "sigma2_nW") {
      config.noise_power_w = positive_number(entry) * kNanowatt;
    } else if (entry.key == "Gamma") {
      config.snr_gap = parse_number(entry);
      if (config.snr_gap < 1)
        throw ParseError(entry.line, "Gamma must be >= 1");
    } else {
      throw ParseError(entry.line, "unknown key: " + entry.key);
    }
  }
  if (!have_k || !have_l || !have_t || !have_tau)
    throw ParseError(1, "missing required key(s): need K, L_bits, T_bits "
                        "and tau_s");

  out.instance.nodes.resize(config.node_count);
  std::vector<bool> node_seen(config.node_count, false);
  const ConfigSection* allocation_section = nullptr;

  for (std::size_t s = 1; s < sections.size(); ++s) {
    const ConfigSection& section = sections[s];
    if (section.name == "allocation") {
      if (allocation_section)
        throw ParseError(section.line, "duplicate [allocation] section");
      allocation_section = &section;
      continue;
    }

    std::size_t index = 0;
    if (std::sscanf(section.name.c_str(), "node %zu", &index) != 1)
      throw ParseError(section.line,
                       "unknown section [" + section.name + "]");
    if (index < 1 || index > config.node_count)
      throw ParseError(section.line, "node index out of range (K = " +
                                         std::to_string(config.node_count) +
                                         ")");
    if (node_seen[index - 1])
      throw ParseError(section.line,
                       "duplicate section [node " + std::to_string(index) +
                           "]");
    node_seen[index - 1] = true;

    NodeProfile& node = out.instance.nodes[index - 1];
    SeenKeys node_keys;
    bool have_c = false, have_p = false, have_f = false, have_h = false;
    for (const ConfigEntry& entry : section.entries) {
      node_keys.mark(entry);
      if (entry.key == "C_cycles_per_bit") {
        node.cycles_per_bit = positive_number(entry);
        have_c = true;
      } else if (entry.key == "P_pJ_per_cycle") {
        node.energy_per_cycle_j = positive_number(entry) * kPicojoule;
        have_p = true;
      } else if (entry.key == "F_GHz") {
        node.clock_hz = positive_number(entry) * kGigahertz;
        have_f = true;
      } else if (entry.key == "h2") {
        node.channel_gain = positive_number(entry);
        have_h = true;
      } else {
        throw ParseError(entry.line, "unknown key in [" + section.name +
                                         "]: " + entry.key);
      }
    }
    if (!have_c || !have_p || !have_f || !have_h)
      throw ParseError(section.line,
                       "[node " + std::to_string(index) +
                           "] needs C_cycles_per_bit, P_pJ_per_cycle, "
                           "F_GHz and h2");
  }

  for (std::size_t k = 0; k < config.node_count; ++k)
    if (!node_seen[k])
      throw ParseError(1, "missing section [node " + std::to_string(k + 1) +
                              "]");

  out.instance.validate();
  if (allocation_section)
    out.allocation =
        parse_allocation_section(*allocation_section, config.node_count);
  return out;
}

Instance parse_instance(const std::string& text) {
  return parse_instance_file(text).instance;
}

std::string serialize_instance(const Instance& instance) {
  const SystemConfig& config = instance.config;
  std::ostringstream os;
  char buffer[64];
  auto num = [&buffer](double v) {
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return std::string(buffer);
  };
  os << "K = " << config.node_count << "\n"
     << "L_bits = " << num(config.dataset_bits) << "\n"
     << "D_bits = " << num(config.local_data_bits) << "\n"
     << "T_bits = " << num(config.intermediate_bits) << "\n"
     << "tau_s = " << num(config.latency_s) << "\n"
     << "B_kHz = " << num(config.bandwidth_hz / kKilohertz) << "\n"
     << "sigma2_nW = " << num(config.noise_power_w / kNanowatt) << "\n"
     << "Gamma = " << num(config.snr_gap) << "\n";
  for (std::size_t k = 0; k < instance.nodes.size(); ++k) {
    const NodeProfile& node = instance.nodes[k];
    os << "\n[node " << k + 1 << "]\n"
       << "C_cycles_per_bit = " << num(node.cycles_per_bit) << "\n"
       << "P_pJ_per_cycle = " << num(node.energy_per_cycle_j / kPicojoule)
       << "\n"
       << "F_GHz = " << num(node.clock_hz / kGigahertz) << "\n"
       << "h2 = " << num(node.channel_gain) << "\n";
  }
  return os.str();
}

}  // namespace wcc
