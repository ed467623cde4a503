#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace andor {

// Seeded 64-bit linear congruential generator (Knuth's MMIX parameters:
// multiplier 6364136223846793005, increment 1442695040888963407). All
// generators in this project draw from it so that emitted model files are
// byte-identical across platforms.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed)
      : state_(seed * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull) {}

  std::uint64_t next() {
    state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
    return state_;
  }

  // uniform in (0, 1]; exact across platforms (53-bit mantissa, power-of-two
  // divisor)
  double unit_open() { return double((next() >> 11) + 1) * 0x1.0p-53; }

  // uniform integer in [0, n)
  int below(int n) { return int(next() % std::uint64_t(n)); }

 private:
  std::uint64_t state_;
};

// Shortest round-trip decimal form; "1" for 1.0, "0.5" for 0.5.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 1469598103934665603ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t h = 1469598103934665603ull) {
  return fnv1a64(s.data(), s.size(), h);
}

}  // namespace andor
