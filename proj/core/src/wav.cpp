// wav.cpp

#include "ndf/wav.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ndf {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

}  // namespace

void write_wav_multi(const std::filesystem::path& path,
                     const std::vector<std::vector<double>>& channels,
                     int sample_rate) {
  if (channels.empty() || channels[0].empty())
    throw InvalidArgument("write_wav: empty signal");
  const std::size_t frames = channels[0].size();
  for (const auto& ch : channels)
    if (ch.size() != frames) throw InvalidArgument("write_wav: ragged channels");

  const std::uint16_t num_ch = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(frames * num_ch * sizeof(float));

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());

  f.write("RIFF", 4);
  put<std::uint32_t>(f, 36 + data_bytes);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  put<std::uint32_t>(f, 16);
  put<std::uint16_t>(f, 3);  // IEEE float
  put<std::uint16_t>(f, num_ch);
  put<std::uint32_t>(f, static_cast<std::uint32_t>(sample_rate));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(sample_rate) * num_ch * sizeof(float));
  put<std::uint16_t>(f, static_cast<std::uint16_t>(num_ch * sizeof(float)));
  put<std::uint16_t>(f, 32);
  f.write("data", 4);
  put<std::uint32_t>(f, data_bytes);
  for (std::size_t i = 0; i < frames; ++i)
    for (std::uint16_t c = 0; c < num_ch; ++c)
      put<float>(f, static_cast<float>(channels[c][i]));
  if (!f) throw IoError("write failed: " + path.string());
}

void write_wav(const std::filesystem::path& path, std::span<const double> signal,
               int sample_rate) {
  write_wav_multi(path, {{signal.begin(), signal.end()}}, sample_rate);
}

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(f)),
                        std::istreambuf_iterator<char>());
  if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
    throw FormatError("malformed WAV header: " + path.string());

  std::uint16_t format = 0, num_ch = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const char* data = nullptr;
  std::uint32_t data_len = 0;

  // Chunk walk.
  std::size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    const char* id = raw.data() + pos;
    const std::uint32_t len = get<std::uint32_t>(raw.data() + pos + 4);
    if (pos + 8 + len > raw.size())
      throw FormatError("truncated WAV chunk: " + path.string());
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw FormatError("short fmt chunk: " + path.string());
      format = get<std::uint16_t>(raw.data() + pos + 8);
      num_ch = get<std::uint16_t>(raw.data() + pos + 10);
      sample_rate = get<std::uint32_t>(raw.data() + pos + 12);
      bits = get<std::uint16_t>(raw.data() + pos + 22);
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = raw.data() + pos + 8;
      data_len = len;
    }
    pos += 8 + len + (len & 1);
  }
  if (!data || num_ch == 0) throw FormatError("WAV missing fmt/data: " + path.string());

  const bool is_float32 = (format == 3 && bits == 32);
  const bool is_pcm16 = (format == 1 && bits == 16);
  if (!is_float32 && !is_pcm16)
    throw FormatError("unsupported WAV encoding (need float32 or pcm16): " + path.string());

  const std::size_t bytes_per = bits / 8;
  const std::size_t frames = data_len / (bytes_per * num_ch);
  WavData out;
  out.sample_rate = static_cast<int>(sample_rate);
  out.channels.assign(num_ch, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::uint16_t c = 0; c < num_ch; ++c) {
      const char* p = data + (i * num_ch + c) * bytes_per;
      out.channels[c][i] = is_float32
                               ? static_cast<double>(get<float>(p))
                               : static_cast<double>(get<std::int16_t>(p)) / 32768.0;
    }
  }
  return out;
}

std::vector<double> read_wav_mono(const std::filesystem::path& path, bool strict) {
  WavData w = read_wav(path);
  if (strict && w.sample_rate != static_cast<int>(kSampleRate))
    throw FormatError("expected 16 kHz WAV, got " + std::to_string(w.sample_rate) +
                      " Hz: " + path.string());
  if (w.channels.size() != 1)
    throw FormatError("expected mono WAV, got " + std::to_string(w.channels.size()) +
                      " channels: " + path.string());
  return std::move(w.channels[0]);
}

}  // namespace ndf
