#include "caprig/fft.hpp"

#include <cmath>
#include <utility>

namespace caprig {

namespace {
bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (n <= 1) return;
  if (!is_pow2(n)) {
    std::vector<std::complex<double>> out(n);
    const double sgn = inverse ? 1.0 : -1.0;
    for (size_t k = 0; k < n; ++k) {
      std::complex<double> s = 0.0;
      for (size_t j = 0; j < n; ++j) {
        const double ang = sgn * 2.0 * kPi * static_cast<double>((j * k) % n) /
                           static_cast<double>(n);
        s += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      out[k] = s;
    }
    a = std::move(out);
    return;
  }
  for (size_t i = 1, j = 0; i < n; ++i) {  // bit-reversal permutation
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::vector<double> spectral_derivative(const std::vector<double>& f, int order,
                                        double period) {
  const int n = static_cast<int>(f.size());
  require(n >= 2, "InsufficientSamples", "spectral derivative needs >= 2 samples");
  require(order >= 1, "InsufficientSamples", "derivative order must be >= 1");
  std::vector<std::complex<double>> a(f.begin(), f.end());
  fft(a, false);
  const double w0 = 2.0 * kPi / period;
  for (int k = 0; k < n; ++k) {
    if (2 * k == n && order % 2 == 1) {
      a[k] = 0.0;
      continue;
    }
    const int kk = k <= n / 2 ? k : k - n;
    a[k] *= std::pow(std::complex<double>(0.0, w0 * kk), order);
  }
  fft(a, true);
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = a[k].real() / n;
  return out;
}

std::vector<double> spectral_antiderivative(const std::vector<double>& f,
                                            double period) {
  const int n = static_cast<int>(f.size());
  require(n >= 2, "InsufficientSamples", "spectral antiderivative needs >= 2 samples");
  std::vector<std::complex<double>> a(f.begin(), f.end());
  fft(a, false);
  const double mean = a[0].real() / n;
  a[0] = 0.0;
  const double w0 = 2.0 * kPi / period;
  for (int k = 1; k < n; ++k) {
    if (2 * k == n) {
      // Nyquist cosine integrates to a sine that vanishes at every node.
      a[k] = 0.0;
      continue;
    }
    const int kk = k <= n / 2 ? k : k - n;
    a[k] /= std::complex<double>(0.0, w0 * kk);
  }
  fft(a, true);
  std::vector<double> out(n);
  const double g0 = a[0].real() / n;
  for (int k = 0; k < n; ++k) {
    const double u = period * k / n;
    out[k] = a[k].real() / n - g0 + mean * u;
  }
  return out;
}

}  // namespace caprig
