#pragma once

#include "ghostsim/grid.hpp"
#include "ghostsim/rng.hpp"

namespace gsim {

enum class SourceStatistics { CircularGaussian, PhaseOnly };

/**
 * Pseudothermal source: every frame is an independent random screen,
 * nonzero only inside a centered aperture.
 *  - circular-gaussian: a = sqrt(I0) * (g1 + i g2)/sqrt(2), fully developed speckle
 *  - phase-only:        a = sqrt(I0) * exp(2 pi i u), unit modulus
 */
struct SourceSpec {
    GridSpec grid;
    double aperture_width = 0.0;  // meters, full width
    double mean_intensity = 1.0;
    SourceStatistics statistics = SourceStatistics::CircularGaussian;
};

/// Draw one source realization. Sample i always consumes counter block i of
/// the frame's source stream, so the screen is independent of aperture,
/// sharding, and evaluation order.
ComplexField generate_frame(const SourceSpec& src, const FrameSeed& seed, double wavelength);

}  // namespace gsim
