#include "holab/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace holab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

int first_nonspace(const std::string& s) {
  int c = 0;
  while (c < static_cast<int>(s.size()) && std::isspace(static_cast<unsigned char>(s[c]))) ++c;
  return c + 1;  // 1-based column
}

}  // namespace

ConfigError::ConfigError(const std::string& msg, int line, int col)
    : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " +
                         msg),
      line(line),
      col(col) {}

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line[0] == '[') {
      const std::size_t close = raw.find(']');
      if (close == std::string::npos)
        throw ConfigError("unterminated section header", lineno, first_nonspace(raw));
      const std::string tail = trim(raw.substr(close + 1));
      if (!tail.empty() && tail[0] != '#' && tail[0] != ';')
        throw ConfigError("trailing characters after section header", lineno,
                          static_cast<int>(close) + 2);
      const std::string name = trim(raw.substr(raw.find('[') + 1, close - raw.find('[') - 1));
      if (name.empty()) throw ConfigError("empty section name", lineno, first_nonspace(raw));
      if (cfg.sections_.count(name))
        throw ConfigError("duplicate section [" + name + "]", lineno, first_nonspace(raw));
      cfg.order_.push_back(name);
      cfg.sections_[name];
      current = name;
      continue;
    }
    const std::size_t eq = raw.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value", lineno, first_nonspace(raw));
    const std::string key = trim(raw.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key", lineno, first_nonspace(raw));
    if (current.empty())
      throw ConfigError("key '" + key + "' outside any section", lineno, first_nonspace(raw));
    auto& entries = cfg.sections_[current];
    for (const auto& [k, v] : entries)
      if (k == key)
        throw ConfigError("duplicate key '" + key + "' in [" + current + "]", lineno,
                          first_nonspace(raw));
    entries.emplace_back(key, trim(raw.substr(eq + 1)));
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool Config::has(const std::string& section) const { return sections_.count(section) > 0; }

bool Config::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return false;
  for (const auto& [k, v] : it->second)
    if (k == key) return true;
  return false;
}

const std::string& Config::get(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it != sections_.end())
    for (const auto& [k, v] : it->second)
      if (k == key) return v;
  throw std::runtime_error("missing config key [" + section + "] " + key);
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != v.size())
    throw std::runtime_error("config key [" + section + "] " + key + " is not a number: " + v);
  return x;
}

long long Config::get_int(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != v.size())
    throw std::runtime_error("config key [" + section + "] " + key + " is not an integer: " + v);
  return x;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key) const {
  const std::string& v = get(section, key);
  std::size_t used = 0;
  std::uint64_t x = 0;
  try {
    x = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != v.size())
    throw std::runtime_error("config key [" + section + "] " + key +
                             " is not an unsigned integer: " + v);
  return x;
}

std::vector<std::string> Config::get_list(const std::string& section,
                                          const std::string& key) const {
  std::istringstream in(get(section, key));
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

const std::vector<std::pair<std::string, std::string>>& Config::entries(
    const std::string& section) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) throw std::runtime_error("missing config section [" + section + "]");
  return it->second;
}

const std::string& default_verify_config() {
  static const std::string text = R"ini(# Verification suite: every tolerance and grid parameter lives here.
[suite]
version = 0.1.0
master_seed = 2026
groups = su2 su3 so3

[c01]
module = transport
operation = constant_endpoint
tolerance = 1e-10
samples = 50
grid = 1024

[c02]
module = transport
operation = integrator_order
tolerance = 0.2
cross_tolerance = 1e-9
loops = 10
grids = 128 256 512 1024
reference_grid = 2048

[c03]
module = transport
operation = gauge_equivariance
tolerance = 1e-6
pairs = 100
grid = 1024

[c04]
module = transport
operation = submersion
tolerance = 1e-5
kernel_tolerance = 1e-10
gauge_points = 20
truncation = 8
grid = 2048

[c05]
module = loop_space
operation = basis_gram
tolerance = 1e-12
truncation = 8
grid = 1024

[c06]
module = fiber_spectra
operation = spectrum_match
tolerance = 1e-4
zero_tolerance = 1e-6
samples = 5
truncation = 4
grid = 256

[c07]
module = fiber_spectra
operation = minimal_trace
tolerance = 1e-12
truncation = 64

[c08]
module = bundle_geometry
operation = homothety
tolerance = 1e-8
pointwise_tolerance = 1e-10
samples = 20
grid = 512

[c09]
module = bundle_geometry
operation = holonomy_factorization
tolerance = 1e-8
samples = 100
invariance_samples = 20
grid = 1024

[c10]
module = fiber_spectra
operation = harmonic_example
tolerance = 0.01
partial_sum_count = 1000000
r2_floor = 0.999
reference_bound = 2.3862943611198906

[c11]
module = fiber_spectra
operation = isoparametric_sphere
tolerance = 1e-3
radius = 0.7853981633974483
truncation = 4
points = 3
grid = 128

[c12]
module = report_cli
operation = determinism
tolerance = 0
)ini";
  return text;
}

}  // namespace holab
