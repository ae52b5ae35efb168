#pragma once
// Discrete Fourier transforms and spectral calculus on periodic samples.
// Used for the angular derivatives on closed level curves, where the
// integrands are trigonometric polynomials and the transforms are exact.
#include "caprig/common.hpp"

#include <complex>
#include <vector>

namespace caprig {

// In-place unnormalized DFT (forward) / inverse DFT. Radix-2 when the length
// is a power of two, direct O(n^2) otherwise. Caller divides by n after the
// inverse.
void fft(std::vector<std::complex<double>>& a, bool inverse);

// Derivative of order `order` (>= 1) of the trigonometric interpolant of n
// equispaced real samples over one period. Odd orders zero the Nyquist mode.
std::vector<double> spectral_derivative(const std::vector<double>& f, int order,
                                        double period);

// Samples of the antiderivative F of the trigonometric interpolant with
// F(u_0) = 0. The mean of f contributes the secular term mean * u, so F is
// generally not periodic (this is what turns speed into arclength).
std::vector<double> spectral_antiderivative(const std::vector<double>& f,
                                            double period);

}  // namespace caprig
