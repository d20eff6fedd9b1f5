// masks.cpp

#include "ndf/masks.hpp"

#include <cmath>

namespace ndf {

Mask oracle_parametric_mask(std::span<const Spectrogram> direct_stems,
                            std::span<const Doa> doas,
                            const DirectivityPattern& pattern) {
  if (direct_stems.empty())
    throw OracleError("oracle mask requires per-source direct stems");
  if (direct_stems.size() != doas.size())
    throw OracleError("oracle mask: one DOA per stem required");
  const std::size_t F = direct_stems[0].num_bins;
  const std::size_t T = direct_stems[0].num_frames;
  for (const Spectrogram& s : direct_stems)
    if (s.num_bins != F || s.num_frames != T)
      throw InvalidArgument("oracle mask: stem shape mismatch");

  // Pattern gain per source is direction-fixed; evaluate once.
  std::vector<double> gains(doas.size());
  for (std::size_t n = 0; n < doas.size(); ++n)
    gains[n] = std::fabs(evaluate(pattern, doas[n]));

  Mask m;
  m.num_bins = F;
  m.num_frames = T;
  m.values.resize(F * T);
  for (std::size_t i = 0; i < F * T; ++i) {
    double best = 0.0;
    std::size_t dominant = 0;
    bool any = false;
    for (std::size_t n = 0; n < direct_stems.size(); ++n) {
      const double mag = std::abs(direct_stems[n].bins[i]);
      if (mag > best) {
        best = mag;
        dominant = n;
        any = true;
      }
    }
    m.values[i] = any ? gains[dominant] : 1.0;
  }
  return m;
}

Spectrogram apply_mask(const Mask& mask, const Spectrogram& reference) {
  if (mask.num_bins != reference.num_bins || mask.num_frames != reference.num_frames)
    throw InvalidArgument("apply_mask: shape mismatch");
  Spectrogram out = reference;
  for (std::size_t i = 0; i < out.bins.size(); ++i) out.bins[i] *= mask.values[i];
  return out;
}

}  // namespace ndf
