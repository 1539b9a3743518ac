#include "ghostsim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace gsim::fft {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

// Plans are created once per transform length and reused for the whole
// process. FFTW_UNALIGNED lets a cached plan execute on any caller buffer.
PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair p;
    p.fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p.fwd || !p.bwd) throw std::runtime_error("fft: plan creation failed");
    return cache.emplace(n, p).first->second;
}

}  // namespace

void forward(std::vector<std::complex<double>>& data) {
    const int n = static_cast<int>(data.size());
    if (n == 0) throw std::invalid_argument("fft::forward: empty buffer");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_for(n).fwd, buf, buf);
}

void inverse(std::vector<std::complex<double>>& data) {
    const int n = static_cast<int>(data.size());
    if (n == 0) throw std::invalid_argument("fft::inverse: empty buffer");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_for(n).bwd, buf, buf);
    const double s = 1.0 / n;
    for (auto& c : data) c *= s;
}

}  // namespace gsim::fft
