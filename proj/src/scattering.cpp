#include "ghostsim/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <tuple>

#include "ghostsim/fft.hpp"

namespace gsim {

void validate_layer(const ScatteringLayer& layer) {
    const double unitarity = std::norm(layer.alpha) + std::norm(layer.beta);
    if (std::abs(unitarity - 1.0) > 1e-12)
        throw std::invalid_argument("ScatteringLayer: |alpha|^2 + |beta|^2 must equal 1");
    if (layer.thickness < 0.0)
        throw std::invalid_argument("ScatteringLayer: thickness must be >= 0");
    if (layer.thickness == 0.0 && std::abs(layer.beta) != 0.0)
        throw std::invalid_argument("ScatteringLayer: zero thickness forces beta = 0");
    if (layer.thickness > 0.0 && std::abs(layer.beta) > 0.0 && !(layer.delta_x > 0.0))
        throw std::invalid_argument("ScatteringLayer: delta_x must be > 0 when scattering");
}

std::pair<double, double> ballistic_fraction(double mu_s, double L) {
    if (mu_s < 0.0) throw std::invalid_argument("ballistic_fraction: mu_s must be >= 0");
    if (L < 0.0) throw std::invalid_argument("ballistic_fraction: L must be >= 0");
    const double alpha = std::exp(-0.5 * mu_s * L);
    const double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
    return {alpha, beta};
}

std::vector<double> gaussian_psf(double delta_x, const GridSpec& grid) {
    if (!(delta_x > 0.0)) throw std::invalid_argument("gaussian_psf: delta_x must be > 0");
    if (grid.dim != 1) throw std::invalid_argument("gaussian_psf: 1-D grids only");
    if (delta_x < grid.pitch / 4.0)
        throw std::invalid_argument(
            "gaussian_psf: delta_x below pitch/4 collapses to a sub-sample kernel; "
            "use the ballistic path instead");

    std::vector<double> psf(static_cast<std::size_t>(grid.n));
    const double peak = std::pow(2.0 / (3.14159265358979323846 * delta_x * delta_x), 0.25);
    double sq_sum = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double r = grid.coord(i) / delta_x;
        psf[i] = peak * std::exp(-r * r);
        sq_sum += psf[i] * psf[i];
    }
    const double scale = 1.0 / std::sqrt(sq_sum * grid.pitch);
    for (auto& v : psf) v *= scale;
    return psf;
}

std::pair<double, double> broadening_model(const MediumParams& p, double L) {
    if (L < 0.0) throw std::invalid_argument("broadening_model: L must be >= 0");
    auto power_law = [&](double k, double a, double b, double c, double d, double e) {
        double v = k;
        if (a != 0) v *= std::pow(p.particle_diameter, a);
        if (b != 0) v /= std::pow(p.wavelength, b);
        if (c != 0) v *= std::pow(p.concentration, c);
        if (d != 0) v *= std::pow(L, d);
        if (e != 0) v *= std::pow(p.refractive_index, e);
        return v;
    };
    double beta_scale = power_law(p.k_beta, p.a_beta, p.b_beta, p.c_beta, p.d_beta, p.e_beta);
    double delta_x = power_law(p.k_x, p.a_x, p.b_x, p.c_x, p.d_x, p.e_x);
    if (beta_scale < 0.0 || delta_x < 0.0 || !std::isfinite(beta_scale) || !std::isfinite(delta_x))
        throw std::invalid_argument("broadening_model: negative or non-finite result");
    beta_scale = std::clamp(beta_scale, 0.0, 1.0);
    return {beta_scale, delta_x};
}

namespace detail {

namespace {
struct KernelKey {
    double delta_x;
    int n;
    double pitch;
    bool operator<(const KernelKey& o) const {
        return std::tie(delta_x, n, pitch) < std::tie(o.delta_x, o.n, o.pitch);
    }
};
}  // namespace

std::shared_ptr<const PsfKernel> psf_kernel(double delta_x, const GridSpec& grid) {
    static std::map<KernelKey, std::shared_ptr<const PsfKernel>> cache;
    static std::shared_mutex mtx;
    const KernelKey key{delta_x, grid.n, grid.pitch};
    {
        std::shared_lock lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    auto kern = std::make_shared<PsfKernel>();
    kern->psf = gaussian_psf(delta_x, grid);
    const int n = grid.n;
    double s = 0.0;
    for (double v : kern->psf) s += v;
    kern->amp_sum = s * grid.pitch;

    // Embed the kernel in a doubled buffer with its center at index 0 so the
    // circular convolution of zero-padded signals equals the linear one,
    // evaluated at the original sample positions.
    auto embed = [&](auto value_of) {
        std::vector<cplx> buf(static_cast<std::size_t>(2 * n), cplx{0.0, 0.0});
        for (int i = 0; i < n; ++i) {
            const int j = (i - n / 2 + 2 * n) % (2 * n);
            buf[j] = value_of(i);
        }
        fft::forward(buf);
        return buf;
    };
    kern->psf_fft = embed([&](int i) { return kern->psf[i]; });
    kern->psf_sq_fft = embed([&](int i) { return kern->psf[i] * kern->psf[i]; });

    std::unique_lock lock(mtx);
    return cache.emplace(key, std::move(kern)).first->second;
}

namespace {

/// Linear convolution with a cached doubled-buffer kernel spectrum, cropped
/// back to the grid and scaled by the sample pitch.
std::vector<cplx> conv_same(const std::vector<cplx>& f, const std::vector<cplx>& kernel_fft,
                            double pitch) {
    const int n = static_cast<int>(f.size());
    std::vector<cplx> buf(static_cast<std::size_t>(2 * n), cplx{0.0, 0.0});
    std::copy(f.begin(), f.end(), buf.begin());
    fft::forward(buf);
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] *= kernel_fft[k];
    fft::inverse(buf);
    std::vector<cplx> out(f.size());
    for (int i = 0; i < n; ++i) out[i] = buf[i] * pitch;
    return out;
}

}  // namespace
}  // namespace detail

ComplexField apply_layer(const ComplexField& f, const ScatteringLayer& layer,
                         const CounterRng* halo_noise) {
    validate_layer(layer);
    if (f.grid.dim != 1) throw std::invalid_argument("apply_layer: 1-D fields only");
    if (layer.thickness == 0.0 || std::abs(layer.beta) == 0.0) return f;

    const auto kern = detail::psf_kernel(layer.delta_x, f.grid);
    const int n = f.grid.n;
    ComplexField out = f;

    const auto blurred = detail::conv_same(f.amp, kern->psf_fft, f.grid.pitch);
    for (int i = 0; i < n; ++i) out.amp[i] = layer.alpha * f.amp[i] + layer.beta * blurred[i];

    if (layer.diffuse_halo) {
        if (!halo_noise)
            throw std::invalid_argument("apply_layer: diffuse_halo layer needs a noise source");

        // Band-limited part of the input; everything above the band is
        // treated as already-diffuse power with no spatial structure.
        std::vector<cplx> low = f.amp;
        double band_power = 0.0, full_power = 0.0;
        for (const auto& a : f.amp) full_power += std::norm(a);
        if (layer.halo_band > 0.0) {
            fft::forward(low);
            for (int k = 0; k < n; ++k)
                if (std::abs(fft::freq(k, n, f.grid.pitch)) > layer.halo_band) low[k] = 0.0;
            fft::inverse(low);
        }
        for (const auto& a : low) band_power += std::norm(a);

        std::vector<cplx> band_intensity(low.size());
        for (std::size_t i = 0; i < low.size(); ++i) band_intensity[i] = std::norm(low[i]);
        const auto env_c = detail::conv_same(band_intensity, kern->psf_sq_fft, f.grid.pitch);

        const double out_of_band = std::max(0.0, full_power - band_power) / n;
        const double s = kern->amp_sum;
        const double halo_amp = std::abs(layer.beta) * std::sqrt(std::max(0.0, 1.0 - s * s));
        for (int i = 0; i < n; ++i) {
            const double env = std::max(0.0, env_c[i].real()) + out_of_band;
            out.amp[i] += halo_amp * std::sqrt(env) *
                          halo_noise->circular_gaussian(static_cast<std::uint64_t>(i));
        }
    }
    return out;
}

}  // namespace gsim
