// room.cpp

#include "ndf/room.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ndf {

namespace {

constexpr int kKernelHalf = 40;  // 81-tap Hann-windowed sinc

struct ImageAccumulator {
  std::vector<double>* out;
  std::size_t count = 0;

  // Adds a windowed-sinc pulse of the given amplitude centered at the
  // fractional sample time t0.
  void add(double gain, double t0) {
    std::vector<double>& h = *out;
    const int len = static_cast<int>(h.size());
    int j0 = static_cast<int>(std::ceil(t0 - kKernelHalf));
    int j1 = static_cast<int>(std::floor(t0 + kKernelHalf));
    j0 = std::max(j0, 0);
    j1 = std::min(j1, len - 1);
    if (j0 > j1) return;
    ++count;

    // sin(pi (j - t0)) flips sign per integer step; one sin call per image.
    double u = static_cast<double>(j0) - t0;
    double s = std::sin(std::numbers::pi * u);
    // Raised-cosine window by recurrence: cos(pi u / kKernelHalf).
    const double delta = std::numbers::pi / kKernelHalf;
    const double two_cos_delta = 2.0 * std::cos(delta);
    double c_prev = std::cos(delta * (u - 1.0));
    double c_cur = std::cos(delta * u);
    for (int j = j0; j <= j1; ++j, u += 1.0) {
      const double sinc =
          std::fabs(u) < 1e-9 ? 1.0 : s / (std::numbers::pi * u);
      const double w = 0.5 * (1.0 + c_cur);
      h[j] += gain * w * sinc;
      s = -s;
      const double c_next = two_cos_delta * c_cur - c_prev;
      c_prev = c_cur;
      c_cur = c_next;
    }
  }
};

void require_inside(const RoomSpec& room, const Vec3& p, const char* what) {
  if (!(p.x > 0.0 && p.x < room.length && p.y > 0.0 && p.y < room.width &&
        p.z > 0.0 && p.z < room.height))
    throw InvalidArgument(std::string(what) + " must lie strictly inside the room");
}

// Image coordinate in one dimension for per-dimension reflection index i:
// even i keeps the source parity, odd i mirrors it.
inline double image_coord(int i, double src, double extent) {
  return (i % 2 == 0) ? src + i * extent : (i + 1) * extent - src;
}

ImpulseResponse simulate_impl(const RoomSpec& room, const Vec3& source,
                              const Vec3& mic, const DirectivityPattern* pattern,
                              const RirOptions& opts) {
  const double c = opts.speed_of_sound;
  const double fs = opts.sample_rate;
  if (!(c > 0.0) || !(fs > 0.0))
    throw InvalidArgument("speed of sound and sample rate must be positive");
  const double direct_dist = (source - mic).norm();
  if (!(direct_dist > 1e-9))
    throw InvalidArgument("source and microphone must not coincide");

  const bool anechoic = room.anechoic();
  if (!anechoic) {
    require_inside(room, source, "source");
    require_inside(room, mic, "microphone");
  }

  const double length_s = opts.length_s > 0.0
                              ? opts.length_s
                              : std::max(1.2 * room.rt60, direct_dist / c + 0.010);
  const std::size_t num_samples =
      static_cast<std::size_t>(std::ceil(length_s * fs)) + kKernelHalf + 1;

  ImpulseResponse rir;
  rir.sample_rate = fs;
  rir.samples.assign(num_samples, 0.0);
  ImageAccumulator acc{&rir.samples};

  auto image_gain = [&](double base, const Vec3& img_pos, double dist) {
    double g = base / (4.0 * std::numbers::pi * dist);
    if (pattern) {
      const Vec3 u = (img_pos - mic) * (1.0 / dist);
      const double az = std::atan2(u.y, u.x);
      const double el = std::asin(std::clamp(u.z, -1.0, 1.0));
      g *= evaluate(*pattern, az, el);
    }
    return g;
  };

  if (anechoic) {
    acc.add(image_gain(1.0, source, direct_dist), direct_dist / c * fs);
    if (opts.image_count) *opts.image_count = acc.count;
    return rir;
  }

  const int max_order = opts.max_order >= 0 ? opts.max_order
                                            : auto_max_order(room, c);
  const double r = rt60_to_reflection(room);

  // Reflection-magnitude table; total bounce count tops out at 3 * max_order.
  std::vector<double> r_pow(3 * max_order + 1);
  r_pow[0] = 1.0;
  for (std::size_t k = 1; k < r_pow.size(); ++k) r_pow[k] = r_pow[k - 1] * r;

  // Images whose delay exceeds the response length contribute nothing; cap the
  // per-dimension index by the reachable distance.
  const double max_dist = (static_cast<double>(num_samples) + kKernelHalf) / fs * c;
  auto dim_bound = [&](double extent) {
    const int reach = static_cast<int>(std::ceil(max_dist / (2.0 * extent))) + 1;
    return std::min(max_order, reach);
  };
  const int bx = dim_bound(room.length);
  const int by = dim_bound(room.width);
  const int bz = dim_bound(room.height);

  for (int ix = -bx; ix <= bx; ++ix) {
    const double px = image_coord(ix, source.x, room.length);
    const double dx2 = (px - mic.x) * (px - mic.x);
    for (int iy = -by; iy <= by; ++iy) {
      const double py = image_coord(iy, source.y, room.width);
      const double dxy2 = dx2 + (py - mic.y) * (py - mic.y);
      for (int iz = -bz; iz <= bz; ++iz) {
        const double pz = image_coord(iz, source.z, room.height);
        const double dist = std::sqrt(dxy2 + (pz - mic.z) * (pz - mic.z));
        const double t0 = dist / c * fs;
        if (t0 - kKernelHalf >= static_cast<double>(num_samples)) continue;
        const int bounces = std::abs(ix) + std::abs(iy) + std::abs(iz);
        acc.add(image_gain(r_pow[bounces], {px, py, pz}, dist), t0);
      }
    }
  }
  if (opts.image_count) *opts.image_count = acc.count;
  return rir;
}

}  // namespace

double rt60_to_reflection(const RoomSpec& room) {
  if (!(room.rt60 > 0.0))
    throw InvalidArgument("rt60_to_reflection requires rt60 > 0");
  const double alpha = 0.161 * room.volume() / (room.surface() * room.rt60);
  if (alpha >= 1.0)
    throw InfeasibleRoomError(
        "requested RT60 is infeasible for this room (Sabine absorption >= 1)");
  if (!(alpha > 0.0)) throw InvalidArgument("degenerate room dimensions");
  return std::sqrt(1.0 - alpha);
}

int auto_max_order(const RoomSpec& room, double speed_of_sound) {
  const double min_dim = std::min({room.length, room.width, room.height});
  if (!(min_dim > 0.0)) throw InvalidArgument("degenerate room dimensions");
  return static_cast<int>(std::ceil(speed_of_sound * room.rt60 / min_dim)) + 1;
}

ImpulseResponse simulate_rir(const RoomSpec& room, const Vec3& source,
                             const Vec3& mic, const RirOptions& opts) {
  return simulate_impl(room, source, mic, nullptr, opts);
}

ImpulseResponse simulate_vdm_rir(const RoomSpec& room, const Vec3& source,
                                 const Vec3& vdm_pos, const DirectivityPattern& pattern,
                                 const RirOptions& opts) {
  return simulate_impl(room, source, vdm_pos, &pattern, opts);
}

std::pair<ImpulseResponse, ImpulseResponse> split_direct_reverb(
    const ImpulseResponse& rir, double direct_delay_s, double window_s) {
  const double fs = rir.sample_rate;
  const long lo = std::lround(std::floor((direct_delay_s - window_s) * fs));
  const long hi = std::lround(std::ceil((direct_delay_s + window_s) * fs));

  ImpulseResponse direct{std::vector<double>(rir.samples.size(), 0.0), fs};
  ImpulseResponse reverb{std::vector<double>(rir.samples.size(), 0.0), fs};
  for (std::size_t i = 0; i < rir.samples.size(); ++i) {
    const long idx = static_cast<long>(i);
    if (idx >= lo && idx <= hi)
      direct.samples[i] = rir.samples[i];
    else
      reverb.samples[i] = rir.samples[i];
  }
  return {std::move(direct), std::move(reverb)};
}

}  // namespace ndf
