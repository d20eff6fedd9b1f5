// tensor_file.hpp
// NDFM binary tensor format: the bridge for masks, weights, and spectrograms
// produced or consumed outside this toolkit.
//
// Layout (little-endian):
//   magic   "NDFM" (4 bytes)
//   version u16 (currently 1)
//   dtype   u16 (0 = complex64 as interleaved float32 pairs, 1 = float32)
//   ndim    u16
//   shape   u32 per dimension
//   payload row-major

#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ndf/stft.hpp"

namespace ndf {

enum class TensorDtype : std::uint16_t { kComplex64 = 0, kFloat32 = 1 };

struct TensorFile {
  TensorDtype dtype = TensorDtype::kFloat32;
  std::vector<std::uint32_t> shape;
  // float32 payload; complex64 stores interleaved (re, im) pairs.
  std::vector<float> data;

  std::size_t element_count() const;
};

inline constexpr std::uint16_t kTensorVersion = 1;

void write_tensor(const std::filesystem::path& path, const TensorFile& tensor);
TensorFile read_tensor(const std::filesystem::path& path);

// Masks interchange as (F, T) tensors with F = 257; complex64 for DNN masks,
// float32 for real oracle gains.
void write_mask(const std::filesystem::path& path, const Mask& mask,
                bool as_float32 = false);
Mask read_mask(const std::filesystem::path& path);

// Beamformer weights interchange as (F, Q) complex64 tensors.
void write_complex_matrix(const std::filesystem::path& path,
                          const std::vector<std::vector<std::complex<double>>>& rows);
std::vector<std::vector<std::complex<double>>> read_complex_matrix(
    const std::filesystem::path& path);

}  // namespace ndf
