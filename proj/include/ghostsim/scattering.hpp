#pragma once

#include <memory>
#include <utility>

#include "ghostsim/grid.hpp"
#include "ghostsim/rng.hpp"

namespace gsim {

/**
 * Thin scattering screen at the entrance plane of a turbid segment.
 * The field splits into a ballistic part (alpha) and a forward-scattered
 * part (beta) blurred by a Gaussian point-scattering amplitude of width
 * delta_x. |alpha|^2 + |beta|^2 = 1.
 *
 * diffuse_halo additionally models the scattered power that the coherent
 * blur kernel does not carry: it re-emerges as a spatially incoherent halo
 * drawn fresh per frame (see apply_layer).
 */
struct ScatteringLayer {
    cplx alpha{1.0, 0.0};
    cplx beta{0.0, 0.0};
    double delta_x = 0.0;   // meters
    double thickness = 0.0; // meters
    std::string label;
    bool diffuse_halo = false;
    double halo_band = 0.0; // 1/m, paraxial band half-width; 0 = full band
};

/// Throws std::invalid_argument if the layer violates its invariants.
void validate_layer(const ScatteringLayer& layer);

/// Beer-Lambert amplitude split of a segment of scattering coefficient mu_s
/// (1/m) and length L: alpha = exp(-mu_s*L/2), beta = sqrt(1 - alpha^2).
std::pair<double, double> ballistic_fraction(double mu_s, double L);

/// Gaussian point-scattering amplitude [2/(pi*dx^2)]^(1/4) * exp(-(x/dx)^2),
/// sampled on the grid and renormalized so sum(P^2)*pitch = 1 exactly.
/// Rejects delta_x < pitch/4 (sub-sample kernel).
std::vector<double> gaussian_psf(double delta_x, const GridSpec& grid);

/// Physical scattering-medium description with power-law exponents mapping
/// (D, w, n, lambda, L) onto the screen parameters. All exponents default to
/// zero, which makes the constants direct specifications of the outputs.
struct MediumParams {
    double particle_diameter = 0.0; // D, meters
    double concentration = 0.0;     // w, particles per volume
    double refractive_index = 1.0;  // n
    double wavelength = 0.0;        // lambda, meters
    double mu_s = 0.0;              // 1/m
    double a_beta = 0, b_beta = 0, c_beta = 0, d_beta = 0, e_beta = 0;
    double a_x = 0, b_x = 0, c_x = 0, d_x = 0, e_x = 0;
    double k_beta = 0.0;
    double k_x = 0.0;
};

/// (beta_scale, delta_x) for a segment of length L. beta_scale is clamped to
/// [0,1]; the caller pairs it with alpha = sqrt(1 - beta_scale^2).
std::pair<double, double> broadening_model(const MediumParams& p, double L);

/**
 * out = alpha * f + beta * (P conv f), linear convolution (zero-padded, cropped
 * back to the grid). Thickness 0 returns the input unchanged.
 *
 * With layer.diffuse_halo set, a noise source must be supplied and the output
 * gains a per-frame incoherent term: scattered power not captured by the
 * coherent kernel (fraction 1 - s^2 of beta^2, s the kernel amplitude sum)
 * reappears as circular Gaussian noise shaped by an envelope. The envelope is
 * P^2 convolved with the intensity of the band-limited part of the input
 * (|spatial freq| <= halo_band); input power outside the band, already
 * diffuse, spreads uniformly across the grid.
 */
ComplexField apply_layer(const ComplexField& f, const ScatteringLayer& layer,
                         const CounterRng* halo_noise = nullptr);

namespace detail {
/// Precomputed kernel spectra shared across frames; cached per (delta_x, grid).
struct PsfKernel {
    std::vector<double> psf;        // renormalized P on the grid
    double amp_sum = 0.0;           // s = sum(P) * pitch
    std::vector<cplx> psf_fft;      // FFT of P embedded in a 2n buffer, center at 0
    std::vector<cplx> psf_sq_fft;   // same for P^2
};
std::shared_ptr<const PsfKernel> psf_kernel(double delta_x, const GridSpec& grid);
}  // namespace detail

}  // namespace gsim
