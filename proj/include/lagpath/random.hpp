#pragma once

#include <cstdint>
#include <random>

namespace lagpath {

// mt19937_64 output is fixed by the standard; the double conversion is done
// here rather than through a distribution so streams are portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11U) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t index(std::uint64_t n) { return eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace lagpath
