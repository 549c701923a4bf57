#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "vocalface/types.hpp"

namespace vf {

// In-place iterative radix-2 FFT. n must be a power of two.
template <typename Scalar>
void fft_radix2(std::vector<std::complex<Scalar>>& a) {
  const size_t n = a.size();
  require((n & (n - 1)) == 0 && n > 0, "InvalidValue", "fft size must be a power of two", 2);
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const Scalar ang = Scalar(-2) * Scalar(M_PI) / Scalar(len);
    const std::complex<Scalar> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<Scalar> w(1);
      for (size_t k = 0; k < len / 2; ++k) {
        auto u = a[i + k];
        auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Magnitude spectrum of a real frame zero-padded to n_fft; returns the
// n_fft/2 + 1 non-redundant bins.
template <typename Scalar>
std::vector<Scalar> real_fft_magnitude(const Scalar* frame, int frame_len, int n_fft) {
  std::vector<std::complex<Scalar>> buf(static_cast<size_t>(n_fft), std::complex<Scalar>(0));
  for (int i = 0; i < frame_len; ++i) buf[static_cast<size_t>(i)] = frame[i];
  fft_radix2(buf);
  std::vector<Scalar> mag(static_cast<size_t>(n_fft / 2 + 1));
  for (int k = 0; k <= n_fft / 2; ++k) mag[static_cast<size_t>(k)] = std::abs(buf[static_cast<size_t>(k)]);
  return mag;
}

inline int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace vf
