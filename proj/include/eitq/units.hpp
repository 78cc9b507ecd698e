#pragma once

#include <cmath>
#include <numbers>

namespace eitq {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// All physics runs in angular frequency; files and the CLI speak Hz.
constexpr double hz_to_rad(double hz) { return kTwoPi * hz; }
constexpr double rad_to_hz(double rad) { return rad / kTwoPi; }

/// Variance ratio in dB relative to the quantum noise limit.
inline double to_db(double variance_ratio) { return 10.0 * std::log10(variance_ratio); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace eitq
