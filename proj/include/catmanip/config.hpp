#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "catmanip/pose.hpp"

namespace catmanip::cli {

// Flat keyed text configuration:
//
//   # comment
//   [section]
//   key = value
//   point_mm = 1 2 3
//
// Keys are addressed as "section.key". Keys ending in _mm or _deg are
// converted to meters / radians when the file is read and exposed without
// the suffix, so all downstream code works in SI units.
class Config {
 public:
  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  geom::Vec3 get_vec3(const std::string& key) const;
  geom::Vec3 get_vec3(const std::string& key, const geom::Vec3& fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;

  // Applies the same suffix conversion as the parser; used for overrides.
  void set(const std::string& key, const std::string& value);

  // Sections in file order (each once); keys of one section in file order.
  const std::vector<std::string>& sections() const { return section_order_; }
  std::vector<std::string> keys_in(const std::string& section) const;

 private:
  std::string resolve(const std::string& key, const std::string& value,
                      const std::string& where);
  const std::string& raw(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::vector<std::string> section_order_;
  std::vector<std::string> key_order_;
};

}  // namespace catmanip::cli
