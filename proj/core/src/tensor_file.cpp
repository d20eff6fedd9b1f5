// tensor_file.cpp

#include "ndf/tensor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ndf {

static_assert(std::endian::native == std::endian::little,
              "NDFM I/O assumes a little-endian host");

std::size_t TensorFile::element_count() const {
  std::size_t n = 1;
  for (std::uint32_t d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

void write_tensor(const std::filesystem::path& path, const TensorFile& tensor) {
  if (tensor.shape.empty())
    throw FormatError("NDFM tensors must have at least one dimension");
  const std::size_t elems = tensor.element_count();
  const std::size_t floats_per = tensor.dtype == TensorDtype::kComplex64 ? 2 : 1;
  if (tensor.data.size() != elems * floats_per)
    throw FormatError("NDFM payload size does not match shape");

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f.write("NDFM", 4);
  const std::uint16_t version = kTensorVersion;
  const std::uint16_t dtype = static_cast<std::uint16_t>(tensor.dtype);
  const std::uint16_t ndim = static_cast<std::uint16_t>(tensor.shape.size());
  f.write(reinterpret_cast<const char*>(&version), 2);
  f.write(reinterpret_cast<const char*>(&dtype), 2);
  f.write(reinterpret_cast<const char*>(&ndim), 2);
  f.write(reinterpret_cast<const char*>(tensor.shape.data()), 4 * ndim);
  f.write(reinterpret_cast<const char*>(tensor.data.data()),
          static_cast<std::streamsize>(tensor.data.size() * sizeof(float)));
  if (!f) throw IoError("write failed: " + path.string());
}

TensorFile read_tensor(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(f)),
                        std::istreambuf_iterator<char>());
  if (raw.size() < 10 || std::memcmp(raw.data(), "NDFM", 4) != 0)
    throw FormatError("not an NDFM tensor: " + path.string());

  std::uint16_t version, dtype, ndim;
  std::memcpy(&version, raw.data() + 4, 2);
  std::memcpy(&dtype, raw.data() + 6, 2);
  std::memcpy(&ndim, raw.data() + 8, 2);
  if (version != kTensorVersion)
    throw FormatError("unsupported NDFM version " + std::to_string(version) + ": " +
                      path.string());
  if (dtype > 1)
    throw FormatError("unknown NDFM dtype code " + std::to_string(dtype) + ": " +
                      path.string());
  if (ndim == 0) throw FormatError("zero-dimensional NDFM tensor: " + path.string());
  if (raw.size() < 10 + 4u * ndim)
    throw FormatError("truncated NDFM header: " + path.string());

  TensorFile t;
  t.dtype = static_cast<TensorDtype>(dtype);
  t.shape.resize(ndim);
  std::memcpy(t.shape.data(), raw.data() + 10, 4 * ndim);

  const std::size_t floats_per = t.dtype == TensorDtype::kComplex64 ? 2 : 1;
  const std::size_t payload = t.element_count() * floats_per * sizeof(float);
  if (raw.size() != 10 + 4u * ndim + payload)
    throw FormatError("NDFM payload length mismatch: " + path.string());
  t.data.resize(payload / sizeof(float));
  std::memcpy(t.data.data(), raw.data() + 10 + 4 * ndim, payload);
  return t;
}

void write_mask(const std::filesystem::path& path, const Mask& mask, bool as_float32) {
  TensorFile t;
  t.shape = {static_cast<std::uint32_t>(mask.num_bins),
             static_cast<std::uint32_t>(mask.num_frames)};
  if (as_float32) {
    t.dtype = TensorDtype::kFloat32;
    t.data.reserve(mask.values.size());
    for (const auto& v : mask.values) t.data.push_back(static_cast<float>(v.real()));
  } else {
    t.dtype = TensorDtype::kComplex64;
    t.data.reserve(mask.values.size() * 2);
    for (const auto& v : mask.values) {
      t.data.push_back(static_cast<float>(v.real()));
      t.data.push_back(static_cast<float>(v.imag()));
    }
  }
  write_tensor(path, t);
}

Mask read_mask(const std::filesystem::path& path) {
  const TensorFile t = read_tensor(path);
  if (t.shape.size() != 2)
    throw FormatError("mask tensor must be 2-D (F, T): " + path.string());
  if (t.shape[0] != kNumBins)
    throw FormatError("mask tensor must have F = " + std::to_string(kNumBins) +
                      " rows, got " + std::to_string(t.shape[0]) + ": " + path.string());
  Mask m;
  m.num_bins = t.shape[0];
  m.num_frames = t.shape[1];
  m.values.resize(m.num_bins * m.num_frames);
  if (t.dtype == TensorDtype::kComplex64) {
    for (std::size_t i = 0; i < m.values.size(); ++i)
      m.values[i] = {static_cast<double>(t.data[2 * i]),
                     static_cast<double>(t.data[2 * i + 1])};
  } else {
    for (std::size_t i = 0; i < m.values.size(); ++i)
      m.values[i] = {static_cast<double>(t.data[i]), 0.0};
  }
  return m;
}

void write_complex_matrix(const std::filesystem::path& path,
                          const std::vector<std::vector<std::complex<double>>>& rows) {
  if (rows.empty() || rows[0].empty())
    throw InvalidArgument("write_complex_matrix: empty matrix");
  TensorFile t;
  t.dtype = TensorDtype::kComplex64;
  t.shape = {static_cast<std::uint32_t>(rows.size()),
             static_cast<std::uint32_t>(rows[0].size())};
  for (const auto& row : rows) {
    if (row.size() != rows[0].size())
      throw InvalidArgument("write_complex_matrix: ragged rows");
    for (const auto& v : row) {
      t.data.push_back(static_cast<float>(v.real()));
      t.data.push_back(static_cast<float>(v.imag()));
    }
  }
  write_tensor(path, t);
}

std::vector<std::vector<std::complex<double>>> read_complex_matrix(
    const std::filesystem::path& path) {
  const TensorFile t = read_tensor(path);
  if (t.shape.size() != 2 || t.dtype != TensorDtype::kComplex64)
    throw FormatError("expected a 2-D complex64 tensor: " + path.string());
  std::vector<std::vector<std::complex<double>>> rows(t.shape[0]);
  std::size_t i = 0;
  for (auto& row : rows) {
    row.resize(t.shape[1]);
    for (auto& v : row) {
      v = {static_cast<double>(t.data[i]), static_cast<double>(t.data[i + 1])};
      i += 2;
    }
  }
  return rows;
}

}  // namespace ndf
