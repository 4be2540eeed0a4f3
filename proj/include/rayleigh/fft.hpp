#pragma once

#include <complex>
#include <span>

namespace rayleigh::fft {

// Real-to-complex transform; out needs in.size()/2 + 1 bins. Plans are cached
// per length and shared; execution uses the new-array interface so concurrent
// calls on distinct buffers are safe.
void forward(std::span<const double> in, std::span<std::complex<double>> out);

// Complex-to-real inverse scaled by 1/n with n = out.size(). Clobbers in.
void inverse(std::span<std::complex<double>> in, std::span<double> out);

// 2D transforms on row-major (n0, n1) data; spectral shape (n0, n1/2 + 1).
void forward2(const double* in, std::complex<double>* out, int n0, int n1);
void inverse2(std::complex<double>* in, double* out, int n0, int n1);

}  // namespace rayleigh::fft
