#pragma once

#include <complex>
#include <vector>

namespace gsim::fft {

/// In-place forward DFT, unnormalized (FFTW sign convention, exp(-2*pi*i*k*j/n)).
void forward(std::vector<std::complex<double>>& data);

/// In-place inverse DFT, scaled by 1/n so inverse(forward(x)) == x.
void inverse(std::vector<std::complex<double>>& data);

/// DFT sample frequency for bin k of an n-point transform with sample spacing d.
inline double freq(int k, int n, double d) {
    const int kk = (k < (n + 1) / 2) ? k : k - n;
    return kk / (n * d);
}

}  // namespace gsim::fft
