// wav.hpp
// Float32 RIFF WAV I/O; the pipeline runs at 16 kHz mono.

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "ndf/common.hpp"

namespace ndf {

struct WavData {
  std::vector<std::vector<double>> channels;
  int sample_rate = 0;
};

// Writes IEEE float32. Multi-channel data is interleaved.
void write_wav(const std::filesystem::path& path, std::span<const double> signal,
               int sample_rate = static_cast<int>(kSampleRate));
void write_wav_multi(const std::filesystem::path& path,
                     const std::vector<std::vector<double>>& channels,
                     int sample_rate = static_cast<int>(kSampleRate));

// Accepts float32 and PCM16 payloads.
WavData read_wav(const std::filesystem::path& path);

// Strict mode enforces the 16 kHz mono pipeline contract.
std::vector<double> read_wav_mono(const std::filesystem::path& path, bool strict = true);

}  // namespace ndf
