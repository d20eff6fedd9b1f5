// fft.cpp

#include "ndf/fft.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace ndf::fft {

namespace {

using cd = std::complex<double>;

// Twiddle tables are cached per size; the table for size n holds e^{-2pi i k/n}
// for k < n/2.
std::shared_ptr<const std::vector<cd>> twiddles_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const std::vector<cd>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto table = std::make_shared<std::vector<cd>>(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    (*table)[k] = cd(std::cos(ang), std::sin(ang));
  }
  cache.emplace(n, table);
  return table;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void transform(std::vector<cd>& buf, bool inverse) {
  const std::size_t n = buf.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw InvalidArgument("FFT size must be a nonzero power of two");
  if (n == 1) return;

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(buf[i], buf[j]);
  }

  auto tw = twiddles_for(n);
  const std::vector<cd>& w = *tw;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        cd tw_k = w[k * stride];
        if (inverse) tw_k = std::conj(tw_k);
        const cd u = buf[start + k];
        const cd v = buf[start + k + len / 2] * tw_k;
        buf[start + k] = u + v;
        buf[start + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (cd& c : buf) c *= scale;
  }
}

std::vector<cd> rfft(std::span<const double> x, std::size_t n) {
  if (x.size() > n) throw InvalidArgument("rfft: signal longer than transform size");
  std::vector<cd> buf(n);
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = cd(x[i], 0.0);
  transform(buf, false);
  buf.resize(n / 2 + 1);
  return buf;
}

std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n) {
  if (bins.size() != n / 2 + 1)
    throw InvalidArgument("irfft: expected n/2+1 bins");
  std::vector<cd> buf(n);
  for (std::size_t k = 0; k <= n / 2; ++k) buf[k] = bins[k];
  for (std::size_t k = n / 2 + 1; k < n; ++k) buf[k] = std::conj(bins[n - k]);
  transform(buf, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real();
  return out;
}

}  // namespace ndf::fft
