#pragma once

#include <cstdint>
#include <string>

namespace tripwire {

/// Deterministic splitmix64 stream. Runs must replay bit-identically across
/// platforms, so all randomness goes through this instead of std
/// distributions (whose outputs vary between standard library
/// implementations).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Modulo bias is irrelevant at desk scale.
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive bounds
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double unit() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }

  std::string hex(std::size_t chars) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(chars);
    while (out.size() < chars) {
      std::uint64_t v = next();
      for (int i = 0; i < 16 && out.size() < chars; ++i) {
        out.push_back(digits[v & 0xF]);
        v >>= 4;
      }
    }
    return out;
  }

  /// Derive an independent sub-stream; `tag` keeps unrelated consumers
  /// (secrets, scenarios, forged alarms) from sharing a sequence.
  static Rng derive(std::uint64_t seed, std::uint64_t tag) {
    Rng mix(seed ^ (0xA0761D6478BD642FULL * (tag + 1)));
    mix.next();
    return mix;
  }

 private:
  std::uint64_t state_;
};

}  // namespace tripwire
