#pragma once

#include <span>
#include <vector>

#include "quasifree/types.hpp"

namespace quasifree {

/// Exponent sign of the discrete Fourier transform, FFTW convention:
/// X_k = sum_j x_j exp(sign * 2 pi i j k / n). Transforms are unnormalized.
enum class FftSign : int { Forward = -1, Backward = +1 };

void fft_inplace(std::span<cplx> data, FftSign sign);

std::vector<cplx> fft(std::span<const cplx> data, FftSign sign);

/// Two-dimensional transform over both indices of a dense matrix.
void fft2_inplace(ComplexMatrix& m, FftSign sign);

}  // namespace quasifree
