#pragma once

// Closed-form constants of alpha-strongly-regular demand.
//
// Everything here depends on alpha only through g(alpha) = (1/(1-alpha))^(1/alpha),
// whose continuous extension at alpha = 0 is e. Formulas branch below
// kAlphaZero so that MHR demand (alpha = 0) is handled exactly.

#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>

namespace bicrit {

inline constexpr double kAlphaZero = 1e-9;

/// (1/(1-alpha))^(1/alpha); e at alpha = 0, +inf at alpha = 1.
template <std::floating_point T>
T peak_ratio(T alpha) {
  if (alpha < T(kAlphaZero)) return std::numbers::e_v<T>;
  if (alpha >= T(1)) return std::numeric_limits<T>::infinity();
  return std::exp(-std::log1p(-alpha) / alpha);
}

/// (1-alpha)^(1/alpha) = 1 / peak_ratio(alpha); 1/e at alpha = 0, 0 at alpha = 1.
template <std::floating_point T>
T threshold_fraction(T alpha) {
  if (alpha < T(kAlphaZero)) return T(1) / std::numbers::e_v<T>;
  if (alpha >= T(1)) return T(0);
  return std::exp(std::log1p(-alpha) / alpha);
}

/// 1/(1-alpha), +inf at alpha = 1.
template <std::floating_point T>
T inverse_gap(T alpha) {
  if (alpha >= T(1)) return std::numeric_limits<T>::infinity();
  return T(1) / (T(1) - alpha);
}

}  // namespace bicrit
