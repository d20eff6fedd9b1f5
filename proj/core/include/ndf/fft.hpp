// fft.hpp
// Iterative radix-2 FFT; every transform size in this toolkit is a power of two.

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "ndf/common.hpp"

namespace ndf::fft {

std::size_t next_pow2(std::size_t n);

// In-place complex transform; size must be a power of two. The inverse
// includes the 1/N factor.
void transform(std::vector<std::complex<double>>& buf, bool inverse);

// One-sided spectrum (n/2+1 bins) of a real signal zero-padded to n.
std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n);

// Real signal of length n from a one-sided spectrum of n/2+1 bins.
std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n);

}  // namespace ndf::fft
