#pragma once

namespace nkpa {

// CODATA 2018 reduced Planck constant, J*s.
inline constexpr double kHbar = 1.054571817e-34;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace nkpa
