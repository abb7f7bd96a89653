#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace stardgt {

/// Standard normal draws from mt19937_64 via Box-Muller. Both stages are fully
/// specified, so a seed yields the same stream on every platform (unlike
/// std::normal_distribution).
class GaussianStream {
 public:
  static constexpr const char* kName = "mt19937_64+box-muller";

  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1], u2 in [0, 1)
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace stardgt
