// room.hpp
// Image-source impulse responses for omnidirectional mics and for
// directivity-weighted virtual directional microphone receivers, plus
// direct/reverberant decomposition.

#pragma once

#include <optional>
#include <utility>

#include "ndf/directivity.hpp"
#include "ndf/geometry.hpp"

namespace ndf {

struct RoomSpec {
  double length = 0.0;  // x extent, m
  double width = 0.0;   // y extent, m
  double height = 0.0;  // z extent, m
  double rt60 = 0.0;    // 0 denotes anechoic

  bool anechoic() const { return rt60 <= 0.0; }
  double volume() const { return length * width * height; }
  double surface() const {
    return 2.0 * (length * width + length * height + width * height);
  }
};

struct ImpulseResponse {
  std::vector<double> samples;
  double sample_rate = kSampleRate;
};

// Uniform wall reflection magnitude |r| = sqrt(1 - alpha) with Sabine
// alpha = 0.161 V / (S RT60). Throws InfeasibleRoomError when alpha >= 1.
double rt60_to_reflection(const RoomSpec& room);

struct RirOptions {
  int max_order = -1;       // < 0: ceil(c RT60 / min dimension) + 1
  double length_s = -1.0;   // < 0: max(1.2 RT60, distance/c + 10 ms)
  double speed_of_sound = kSpeedOfSound;
  double sample_rate = kSampleRate;
  // Number of image contributions actually added, for verification.
  std::size_t* image_count = nullptr;
};

int auto_max_order(const RoomSpec& room, double speed_of_sound = kSpeedOfSound);

// Allen-Berkley image sum with uniform reflection coefficients; each image
// lands at its fractional delay through an 81-tap Hann-windowed sinc kernel.
// An anechoic room (rt60 = 0) reduces to the free-field direct path and
// ignores the walls; otherwise source and mic must lie strictly inside.
ImpulseResponse simulate_rir(const RoomSpec& room, const Vec3& source,
                             const Vec3& mic, const RirOptions& opts = {});

// Identical image set, with every image additionally weighted by the pattern
// gain at its arrival direction.
ImpulseResponse simulate_vdm_rir(const RoomSpec& room, const Vec3& source,
                                 const Vec3& vdm_pos, const DirectivityPattern& pattern,
                                 const RirOptions& opts = {});

// Partition around the direct arrival: samples within +-window_s of
// direct_delay_s go to the direct part, the remainder to the reverberant part.
// direct + reverb reconstructs the input sample-exactly.
std::pair<ImpulseResponse, ImpulseResponse> split_direct_reverb(
    const ImpulseResponse& rir, double direct_delay_s, double window_s = 0.0025);

}  // namespace ndf
