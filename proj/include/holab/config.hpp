#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace holab {

// Parse failure with 1-based position into the config text.
struct ConfigError : std::runtime_error {
  int line = 0;
  int col = 0;
  ConfigError(const std::string& msg, int line, int col);
};

// Sectioned key = value text. '#' or ';' start a comment line; keys live
// inside a [section]; duplicates are rejected so every tolerance has exactly
// one source of truth.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  const std::string& get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key) const;
  // whitespace-separated value list
  std::vector<std::string> get_list(const std::string& section, const std::string& key) const;

  const std::vector<std::string>& sections() const { return order_; }
  const std::vector<std::pair<std::string, std::string>>& entries(
      const std::string& section) const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
};

// The shipped verification-suite configuration; configs/verify_default.ini
// must stay byte-identical to it.
const std::string& default_verify_config();

}  // namespace holab
