#pragma once

#include <complex>
#include <span>
#include <vector>

namespace vsaxmc::fft {

using Complex = std::complex<double>;

// Unnormalized forward DFT of a real sequence: X_j = sum_n x_n e^{-2 pi i jn/d}.
// Any length >= 1. Thread-safe.
std::vector<Complex> forward(std::span<const double> x);

// Inverse DFT carrying the 1/d factor; returns the real part.
// The caller is responsible for handing in a Hermitian spectrum when a
// real result is expected.
std::vector<double> inverse_real(std::span<const Complex> bins);

}  // namespace vsaxmc::fft
