#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace wavecoh::detail {

/// In-place complex FFT for power-of-two lengths, backed by FFTW with a
/// process-wide plan cache. Plans are created with FFTW_ESTIMATE so the
/// chosen algorithm (and hence rounding) never depends on runtime timing.
/// Execution is thread-safe; plan creation is internally serialized.
void fft_forward(std::span<std::complex<double>> data);

/// Inverse transform including the 1/N normalization.
void fft_inverse(std::span<std::complex<double>> data);

[[nodiscard]] constexpr std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace wavecoh::detail
