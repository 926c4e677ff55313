#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace holab {

// Deterministic draws: raw 64-bit engine output mapped to doubles explicitly,
// normals via Box-Muller. No std::*_distribution, whose streams vary by libc.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  double uniform() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
  }

  // Inclusive range; modulo bias is ~span/2^64, irrelevant here.
  int range(int lo, int hi) {
    return lo + static_cast<int>(raw() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Per-case seeds: FNV-1a over the tag, mixed with the master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  std::uint64_t h = 1469598103934665603ull ^ master;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace holab
