#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsim {

using cplx = std::complex<double>;

/**
 * Uniform sampling grid, centered convention: sample i sits at (i - n/2) * pitch.
 * dim selects 1-D lines or square 2-D grids (n x n samples).
 */
struct GridSpec {
    int n = 0;
    double pitch = 0.0;  // meters
    int dim = 1;

    std::size_t samples() const {
        return dim == 2 ? static_cast<std::size_t>(n) * n : static_cast<std::size_t>(n);
    }
    double extent() const { return n * pitch; }
    double coord(int i) const { return (i - n / 2) * pitch; }
    /// Nearest sample index for a physical coordinate, clamped to the grid.
    int index_of(double x) const {
        int i = static_cast<int>(std::lround(x / pitch)) + n / 2;
        if (i < 0) i = 0;
        if (i >= n) i = n - 1;
        return i;
    }
    bool operator==(const GridSpec&) const = default;
};

inline GridSpec make_grid(int n, double pitch, int dim = 1) {
    if (n < 8) throw std::invalid_argument("make_grid: n must be >= 8");
    if (!(pitch > 0.0)) throw std::invalid_argument("make_grid: pitch must be > 0");
    if (dim != 1 && dim != 2) throw std::invalid_argument("make_grid: dim must be 1 or 2");
    return GridSpec{n, pitch, dim};
}

/// Scalar complex field sampled on a grid.
struct ComplexField {
    GridSpec grid;
    std::vector<cplx> amp;
    double wavelength = 0.0;  // meters
    std::string plane_label;
};

inline ComplexField make_field(const GridSpec& g, double wavelength, std::string label = {}) {
    if (!(wavelength > 0.0)) throw std::invalid_argument("make_field: wavelength must be > 0");
    ComplexField f;
    f.grid = g;
    f.amp.assign(g.samples(), cplx{0.0, 0.0});
    f.wavelength = wavelength;
    f.plane_label = std::move(label);
    return f;
}

/// Non-negative intensity samples on a grid.
struct IntensityFrame {
    GridSpec grid;
    std::vector<double> values;
};

/// Sum of |a|^2 (or intensity) times the per-sample cell measure pitch^dim.
inline double total_power(const ComplexField& f) {
    double s = 0.0;
    for (const auto& a : f.amp) s += std::norm(a);
    double cell = f.grid.pitch;
    if (f.grid.dim == 2) cell *= f.grid.pitch;
    return s * cell;
}

inline double total_power(const IntensityFrame& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    double cell = f.grid.pitch;
    if (f.grid.dim == 2) cell *= f.grid.pitch;
    return s * cell;
}

namespace detail {
/// Index map of the parity flip x -> -x on a periodic centered grid: i -> (n - i) mod n.
/// Sample 0 (coordinate -n/2 * pitch, its own periodic mirror) maps to itself.
inline int flip_index(int i, int n) { return (n - i) % n; }
}  // namespace detail

inline IntensityFrame flip(const IntensityFrame& f) {
    if (f.grid.dim != 1) throw std::invalid_argument("flip: 1-D frames only");
    IntensityFrame out{f.grid, std::vector<double>(f.values.size())};
    const int n = f.grid.n;
    for (int i = 0; i < n; ++i) out.values[detail::flip_index(i, n)] = f.values[i];
    return out;
}

inline ComplexField flip(const ComplexField& f) {
    if (f.grid.dim != 1) throw std::invalid_argument("flip: 1-D fields only");
    ComplexField out = f;
    const int n = f.grid.n;
    for (int i = 0; i < n; ++i) out.amp[detail::flip_index(i, n)] = f.amp[i];
    return out;
}

inline IntensityFrame measure_intensity(const ComplexField& f) {
    IntensityFrame out{f.grid, std::vector<double>(f.amp.size())};
    for (std::size_t i = 0; i < f.amp.size(); ++i) out.values[i] = std::norm(f.amp[i]);
    return out;
}

}  // namespace gsim
