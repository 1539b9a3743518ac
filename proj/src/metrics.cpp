#include "ghostsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ghostsim/fft.hpp"

namespace gsim {

namespace {

double masked_mean(const std::vector<double>& img, const std::vector<std::uint8_t>& mask,
                   const char* which) {
    double s = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < img.size(); ++i)
        if (mask[i]) {
            s += img[i];
            ++k;
        }
    if (k == 0) throw std::invalid_argument(std::string("visibility: empty ") + which + " mask");
    return s / static_cast<double>(k);
}

double median_of(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty range");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

std::vector<double> gaussian_smooth(const std::vector<double>& v, double sigma_samples) {
    const int n = static_cast<int>(v.size());
    const int h = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_samples)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * h + 1));
    double ksum = 0.0;
    for (int k = -h; k <= h; ++k) {
        kernel[k + h] = std::exp(-0.5 * (k / sigma_samples) * (k / sigma_samples));
        ksum += kernel[k + h];
    }
    for (auto& w : kernel) w /= ksum;
    std::vector<double> out(v.size());
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = -h; k <= h; ++k) {
            int j = i + k;
            if (j < 0) j = -j - 1;  // reflect at the boundaries
            if (j >= n) j = 2 * n - 1 - j;
            s += kernel[k + h] * v[j];
        }
        out[i] = s;
    }
    return out;
}

}  // namespace

double visibility(const std::vector<double>& img, const std::vector<std::uint8_t>& fg_mask,
                  const std::vector<std::uint8_t>& bg_mask) {
    if (fg_mask.size() != img.size() || bg_mask.size() != img.size())
        throw std::invalid_argument("visibility: mask size does not match image");
    for (std::size_t i = 0; i < img.size(); ++i)
        if (fg_mask[i] && bg_mask[i])
            throw std::invalid_argument("visibility: masks must be disjoint");
    const double fg = masked_mean(img, fg_mask, "foreground");
    const double bg = masked_mean(img, bg_mask, "background");
    if (fg == 0.0 && bg == 0.0)
        throw std::invalid_argument("visibility: both region means are zero");
    return (fg - bg) / (fg + bg);
}

double fidelity(const std::vector<double>& img, const std::vector<double>& truth) {
    if (img.size() != truth.size() || img.empty())
        throw std::invalid_argument("fidelity: size mismatch");
    const double n = static_cast<double>(img.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        ma += img[i];
        mb += truth[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double da = img[i] - ma, db = truth[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw std::invalid_argument("fidelity: constant input has no correlation");
    return sab / std::sqrt(saa * sbb);
}

double speckle_size(const IntensityFrame& frame) {
    if (frame.grid.dim != 1) throw std::invalid_argument("speckle_size: 1-D frames only");
    const int n = frame.grid.n;
    double mean = 0.0;
    for (double v : frame.values) mean += v;
    mean /= n;

    std::vector<cplx> buf(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) buf[i] = frame.values[i] - mean;
    fft::forward(buf);
    for (auto& c : buf) c = std::norm(c);
    fft::inverse(buf);
    const double c0 = buf[0].real();
    if (!(c0 > 0.0)) throw std::invalid_argument("speckle_size: constant frame has no speckle");

    for (int k = 1; k <= n / 2; ++k) {
        const double ck = buf[k].real() / c0;
        if (ck < 0.5) {
            const double prev = buf[k - 1].real() / c0;
            const double frac = (prev - 0.5) / (prev - ck);
            const double fwhm = 2.0 * frame.grid.pitch * (k - 1 + frac);
            if (fwhm > frame.grid.extent() / 10.0)
                throw std::invalid_argument(
                    "speckle_size: fewer than ~10 speckles across the frame");
            return fwhm;
        }
    }
    throw std::invalid_argument("speckle_size: autocovariance never falls below half maximum");
}

double edge_width(const std::vector<double>& profile, const GridSpec& grid, double edge_location,
                  const EdgeOptions& opt) {
    if (profile.size() != grid.samples())
        throw std::invalid_argument("edge_width: profile size does not match grid");

    std::vector<double> work =
        opt.smooth_sigma > 0.0 ? gaussian_smooth(profile, opt.smooth_sigma / grid.pitch) : profile;

    int lo = 0, hi = grid.n;
    if (opt.half_window > 0.0) {
        lo = std::max(0, grid.index_of(edge_location - opt.half_window));
        hi = std::min(grid.n, grid.index_of(edge_location + opt.half_window) + 1);
    }
    const int m = hi - lo;
    if (m < 6) throw std::invalid_argument("edge_width: window too narrow");
    std::vector<double> w(work.begin() + lo, work.begin() + hi);

    // Plateau levels from the outer thirds; direction from their order.
    std::vector<double> left(w.begin(), w.begin() + m / 3);
    std::vector<double> right(w.end() - m / 3, w.end());
    double lo_level = median_of(left), hi_level = median_of(right);
    bool falling = lo_level > hi_level;
    if (falling) {
        std::reverse(w.begin(), w.end());
        std::swap(lo_level, hi_level);
    }
    if (!(hi_level > lo_level))
        throw std::invalid_argument("edge_width: window is flat, no edge to measure");

    const double l10 = lo_level + 0.10 * (hi_level - lo_level);
    const double l90 = lo_level + 0.90 * (hi_level - lo_level);
    int i90 = -1;
    for (int i = 0; i < m; ++i)
        if (w[i] > l90) {
            i90 = i;
            break;
        }
    if (i90 <= 0)
        throw std::invalid_argument("edge_width: no 90% crossing inside the window");
    int i10 = -1;
    for (int i = i90 - 1; i >= 0; --i)
        if (w[i] < l10) {
            i10 = i;
            break;
        }
    if (i10 < 0)
        throw std::invalid_argument(
            "edge_width: no 10% crossing before the 90% crossing (non-monotonic window)");
    return (i90 - i10) * grid.pitch;
}

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> slit_region_masks(
    const GridSpec& grid, double a, double d) {
    std::vector<std::uint8_t> fg(grid.samples(), 0), bg(grid.samples(), 0);
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.coord(i);
        const double r = std::abs(std::abs(x) - d / 2);
        if (r < 0.3 * a) fg[i] = 1;
        const double out = std::abs(x);
        if (out > d / 2 + a && out < d / 2 + 3 * a) bg[i] = 1;
    }
    return {fg, bg};
}

}  // namespace gsim
