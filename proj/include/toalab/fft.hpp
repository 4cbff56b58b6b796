#pragma once

#include <complex>
#include <span>

namespace toalab::fft {

/// Unitary forward DFT: X[k] = 1/sqrt(N) * sum_n x[n] e^{-j2πkn/N}.
void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

/// Unitary inverse DFT: x[n] = 1/sqrt(N) * sum_k X[k] e^{+j2πkn/N}.
void inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

} // namespace toalab::fft
