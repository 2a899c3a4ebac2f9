#pragma once

#include <complex>
#include <string>

namespace qnls::fft {

// In-place unnormalized DFT of length n. sign = -1 computes sum_j a_j e^{-2 pi i jk/n},
// sign = +1 the conjugate kernel. Plans are cached per (n, sign) and shared between threads.
void execute(std::complex<double>* data, int n, int sign);

std::string backend_version();

}  // namespace qnls::fft
