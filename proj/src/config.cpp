#include "catmanip/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "catmanip/errors.hpp"

namespace catmanip::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

std::vector<double> parse_numbers(const std::string& value, const std::string& where) {
  std::istringstream ss(value);
  std::vector<double> out;
  double v;
  while (ss >> v) out.push_back(v);
  std::string leftover;
  if (ss.clear(), ss >> leftover) {
    throw ConfigError("non-numeric token in " + where);
  }
  if (out.empty()) throw ConfigError("expected numbers in " + where);
  for (double d : out) {
    if (!std::isfinite(d)) throw ConfigError("non-finite number in " + where);
  }
  return out;
}

}  // namespace

std::string Config::resolve(const std::string& key, const std::string& value,
                            const std::string& where) {
  double factor = 0.0;
  std::string resolved = key;
  if (ends_with(key, "_mm")) {
    factor = 1e-3;
    resolved = key.substr(0, key.size() - 3);
  } else if (ends_with(key, "_deg")) {
    factor = M_PI / 180.0;
    resolved = key.substr(0, key.size() - 4);
  }
  std::string stored = trim(value);
  if (factor != 0.0) {
    const std::vector<double> nums = parse_numbers(stored, where);
    std::string converted;
    for (std::size_t i = 0; i < nums.size(); ++i) {
      if (i) converted += ' ';
      converted += format_double(nums[i] * factor);
    }
    stored = converted;
  }
  if (values_.count(resolved)) {
    throw ConfigError("duplicate key '" + resolved + "' in " + where);
  }
  values_[resolved] = stored;
  key_order_.push_back(resolved);
  return resolved;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header in " + where);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name in " + where);
      if (std::find(cfg.section_order_.begin(), cfg.section_order_.end(), section) ==
          cfg.section_order_.end()) {
        cfg.section_order_.push_back(section);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value in " + where);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key in " + where);
    if (section.empty()) throw ConfigError("key outside any section in " + where);
    cfg.resolve(section + "." + key, line.substr(eq + 1), where);
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

void Config::set(const std::string& key, const std::string& value) {
  double factor = 0.0;
  std::string resolved = key;
  if (ends_with(key, "_mm")) {
    factor = 1e-3;
    resolved = key.substr(0, key.size() - 3);
  } else if (ends_with(key, "_deg")) {
    factor = M_PI / 180.0;
    resolved = key.substr(0, key.size() - 4);
  }
  std::string stored = trim(value);
  if (factor != 0.0) {
    const std::vector<double> nums = parse_numbers(stored, "override " + key);
    std::string converted;
    for (std::size_t i = 0; i < nums.size(); ++i) {
      if (i) converted += ' ';
      converted += format_double(nums[i] * factor);
    }
    stored = converted;
  }
  if (!values_.count(resolved)) key_order_.push_back(resolved);
  values_[resolved] = stored;
  const auto dot = resolved.find('.');
  if (dot != std::string::npos) {
    const std::string section = resolved.substr(0, dot);
    if (std::find(section_order_.begin(), section_order_.end(), section) ==
        section_order_.end()) {
      section_order_.push_back(section);
    }
  }
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const std::vector<double> nums = parse_numbers(raw(key), "key " + key);
  if (nums.size() != 1) throw ConfigError("key '" + key + "' is not a single number");
  return nums[0];
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long Config::get_int(const std::string& key) const {
  const double v = get_double(key);
  const long i = std::lround(v);
  if (std::abs(v - static_cast<double>(i)) > 1e-9) {
    throw ConfigError("key '" + key + "' is not an integer");
  }
  return i;
}

long Config::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = raw(key);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("key '" + key + "' is not a boolean");
}

geom::Vec3 Config::get_vec3(const std::string& key) const {
  const std::vector<double> nums = parse_numbers(raw(key), "key " + key);
  if (nums.size() != 3) throw ConfigError("key '" + key + "' is not a 3-vector");
  return geom::Vec3(nums[0], nums[1], nums[2]);
}

geom::Vec3 Config::get_vec3(const std::string& key, const geom::Vec3& fallback) const {
  return has(key) ? get_vec3(key) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  return parse_numbers(raw(key), "key " + key);
}

std::vector<std::string> Config::keys_in(const std::string& section) const {
  std::vector<std::string> out;
  const std::string prefix = section + ".";
  for (const std::string& key : key_order_) {
    if (key.rfind(prefix, 0) == 0) out.push_back(key.substr(prefix.size()));
  }
  return out;
}

}  // namespace catmanip::cli
