#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace blowbot {

using Vec2 = Eigen::Vector2d;
using Rng = std::mt19937_64;

/// Raised for invalid user-facing configuration (bad config keys, crowded
/// environments, incompatible checkpoints).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for broken internal invariants: NaN in the physics state, scheduling
/// slots used out of order, stepping a finished episode. Never caught by the
/// library itself.
class InternalFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

[[noreturn]] inline void fault(const std::string& what) { throw InternalFault(what); }

/// Grid cell index. Rows run along +y, columns along +x.
struct Cell {
  int row = 0;
  int col = 0;
  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double theta) {
  double wrapped = std::fmod(theta + kPi, 2.0 * kPi);
  if (wrapped < 0.0) wrapped += 2.0 * kPi;
  wrapped -= kPi;
  if (wrapped >= kPi) wrapped -= 2.0 * kPi;
  return wrapped;
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// SplitMix64 finaliser; used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0) {
  return mix_seed(mix_seed(base ^ mix_seed(stream)) + index);
}

}  // namespace blowbot
