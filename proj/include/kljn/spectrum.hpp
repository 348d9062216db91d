#pragma once

#include <complex>
#include <span>
#include <vector>

namespace kljn {

/// Inverse real DFT (unnormalized): x[t] = sum_k X[k] e^{2 pi i k t / n} over
/// the Hermitian spectrum implied by the half-spectrum bins k = 0..n/2. Bins
/// beyond half_spectrum.size() are zero.
std::vector<double> inverse_real_dft(std::span<const std::complex<double>> half_spectrum,
                                     std::size_t n);

/// |X[k]|^2 of the forward real DFT, k = 0..n/2.
std::vector<double> power_spectrum(std::span<const double> x);

}  // namespace kljn
