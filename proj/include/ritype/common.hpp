#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ritype {

// Error taxonomy, mapped 1:1 onto process exit codes by the CLI layer.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
  static constexpr int exit_code = 2;
};

struct ParamError : std::runtime_error {
  using std::runtime_error::runtime_error;
  static constexpr int exit_code = 3;
};

struct StatError : std::runtime_error {
  using std::runtime_error::runtime_error;
  static constexpr int exit_code = 4;
};

// Round half away from zero at the given number of decimals.
inline double round_half_up(double x, int digits) {
  double scale = std::pow(10.0, digits);
  double r = std::floor(std::fabs(x) * scale + 0.5) / scale;
  return x < 0 ? -r : r;
}

// FNV-1a 64-bit content hash; used for input digests in run reports.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

// splitmix64: tiny seedable generator with identical output on every
// platform; the only randomness source in the project.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) from the top 53 bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace ritype
