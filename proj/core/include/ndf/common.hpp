// common.hpp
// Shared constants, error types, and small utilities.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ndf {

inline constexpr double kSampleRate = 16000.0;
inline constexpr std::size_t kFrameLen = 512;   // 32 ms
inline constexpr std::size_t kHop = 256;        // 50% overlap
inline constexpr std::size_t kNumBins = kFrameLen / 2 + 1;  // 257
inline constexpr double kBinSpacingHz = kSampleRate / static_cast<double>(kFrameLen);
inline constexpr double kSpeedOfSound = 343.0;  // m/s
inline constexpr double kAttenuationFloor = 0.01;  // -40 dB
inline constexpr double kSdrEpsilon = 1e-7;

inline constexpr const char* kToolkitVersion = "0.1.0";

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

// Sabine inversion cannot produce a physical reflection coefficient.
struct InfeasibleRoomError : Error {
  using Error::Error;
};

// Scene rejection sampling exhausted its retry budget.
struct SamplingError : Error {
  using Error::Error;
};

// All-zero signal or stem where energy is required.
struct DegenerateSignalError : Error {
  using Error::Error;
};

// Beamformer constraint set cannot be met.
struct DesignError : Error {
  using Error::Error;
};

// Oracle inputs (per-source stems) are missing.
struct OracleError : Error {
  using Error::Error;
};

// Mini-batch constraints cannot be satisfied.
struct PlanningError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Malformed or mismatched on-disk format.
struct FormatError : Error {
  using Error::Error;
};

// Config file / override problems (CLI exit 2).
struct ConfigError : Error {
  using Error::Error;
};

// External mask set does not cover the manifest (CLI exit 5).
struct MaskCardinalityError : Error {
  using Error::Error;
};

inline double deg2rad(double deg) { return deg * (std::numbers::pi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / std::numbers::pi); }

// Wrap an angle in degrees to [0, 360).
inline double wrap_deg(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  return w;
}

// Absolute angular distance in degrees, in [0, 180].
inline double angular_distance_deg(double a, double b) {
  double d = std::fabs(wrap_deg(a) - wrap_deg(b));
  return d > 180.0 ? 360.0 - d : d;
}

// splitmix64; used to derive independent per-scene seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double db_from_power(double p) { return 10.0 * std::log10(p); }
inline double db_from_amplitude(double a) { return 20.0 * std::log10(a); }

}  // namespace ndf
