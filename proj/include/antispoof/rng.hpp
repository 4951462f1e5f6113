#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace antispoof {

// Deterministic random source used wherever reproducibility matters (data
// splits, fixture synthesis). The engine is std::mt19937, whose output
// sequence is fixed by the standard; the value mappings below are written
// out explicitly because the std::*_distribution adaptors are not
// guaranteed to produce identical streams across library implementations.
class Rng {
 public:
  explicit Rng(std::uint32_t seed) : gen_(seed) {}

  std::uint32_t next_u32() { return gen_(); }

  // Uniform in [0, 1) with 53-bit resolution (two engine draws).
  double uniform() {
    const std::uint32_t a = gen_() >> 5;   // 27 bits
    const std::uint32_t b = gen_() >> 6;   // 26 bits
    return (a * 67108864.0 + b) / 9007199254740992.0;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Modulo mapping; the bias is negligible for
  // the small ranges used here and keeps the mapping trivially portable.
  std::uint32_t below(std::uint32_t n) { return n == 0 ? 0 : gen_() % n; }

  // Standard normal via Box-Muller (pinned, unlike std::normal_distribution).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // In-place Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = below(static_cast<std::uint32_t>(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace antispoof
