#pragma once

// Discrete Fourier transforms of arbitrary length: iterative radix-2 for
// powers of two, Bluestein's chirp-z reduction otherwise.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace sigcomp::fft {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place unnormalized transform; sign -1 forward, +1 inverse.
inline void radix2(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx w = std::polar(1.0, ang * static_cast<double>(k));
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

inline std::vector<cplx> bluestein(std::span<const cplx> x, int sign) {
  const std::size_t n = x.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  // chirp_k = exp(sign * i*pi*k^2/n), with k^2 reduced mod 2n to keep the angle small
  std::vector<cplx> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k2 = (k * k) % (2 * n);
    chirp[k] = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(k2) /
                                   static_cast<double>(n));
  }
  std::vector<cplx> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  radix2(a, -1);
  radix2(b, -1);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  radix2(a, +1);
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k] / static_cast<double>(m);
  return out;
}

}  // namespace detail

/// Unnormalized DFT: X_k = sum_j x_j exp(sign * 2*pi*i*j*k/n).
inline std::vector<cplx> dft(std::span<const cplx> x, int sign = -1) {
  if (x.empty()) return {};
  if (detail::is_pow2(x.size())) {
    std::vector<cplx> a(x.begin(), x.end());
    detail::radix2(a, sign);
    return a;
  }
  return detail::bluestein(x, sign);
}

/// Unitary forward transform F (1/sqrt(n) scaling).
inline std::vector<cplx> forward(std::span<const cplx> x) {
  auto out = dft(x, -1);
  const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (auto& v : out) v *= s;
  return out;
}

/// Unitary inverse transform F* (1/sqrt(n) scaling); inverse(forward(x)) == x.
inline std::vector<cplx> inverse(std::span<const cplx> x) {
  auto out = dft(x, +1);
  const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (auto& v : out) v *= s;
  return out;
}

template <class Real>
std::vector<cplx> to_complex(std::span<const Real> x) {
  std::vector<cplx> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = cplx(static_cast<double>(x[i]), 0.0);
  return out;
}

}  // namespace sigcomp::fft
