// masks.hpp
// Oracle parametric mask and mask application.

#pragma once

#include <span>

#include "ndf/directivity.hpp"
#include "ndf/stft.hpp"

namespace ndf {

// Real gain per TF bin: the target pattern magnitude at the DOA of whichever
// source has the largest direct-stem magnitude there (floor-clamped). Bins
// where every stem is zero get a neutral gain of 1.
Mask oracle_parametric_mask(std::span<const Spectrogram> direct_stems,
                            std::span<const Doa> doas,
                            const DirectivityPattern& pattern);

// Elementwise complex product with the reference spectrogram.
Spectrogram apply_mask(const Mask& mask, const Spectrogram& reference);

}  // namespace ndf
