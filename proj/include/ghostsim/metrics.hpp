#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ghostsim/grid.hpp"

namespace gsim {

struct MetricReport {
    std::optional<double> visibility;    // in [0,1] (negative raw values clamp to 0)
    std::optional<double> fidelity;      // in [-1,1]
    std::optional<double> speckle_fwhm;  // meters
    std::optional<double> edge_width;    // meters
    std::string notes;
};

/// (mean_fg - mean_bg) / (mean_fg + mean_bg) over the mask regions.
double visibility(const std::vector<double>& img, const std::vector<std::uint8_t>& fg_mask,
                  const std::vector<std::uint8_t>& bg_mask);

/// Pearson correlation after mean removal. Inputs must not be constant.
double fidelity(const std::vector<double>& img, const std::vector<double>& truth);

/// FWHM of the normalized intensity autocovariance peak, interpolated between
/// samples. Needs a frame holding many speckles; constant frames are an error.
double speckle_size(const IntensityFrame& frame);

struct EdgeOptions {
    // Half-width of the analysis window around the edge (0 = whole profile).
    double half_window = 0.0;
    // Gaussian pre-smoothing length in meters (0 = none). Raw estimates on
    // noisy ensembles need a little smoothing; analytic profiles none.
    double smooth_sigma = 0.0;
};

/**
 * 10%-90% transition distance of the edge nearest edge_location.
 * Plateau levels are medians of the outer thirds of the window; the width is
 * the distance from the last sample below the 10% level to the first sample
 * above the 90% level, so an ideal step reports exactly one pitch. Flat or
 * effectively non-monotonic windows are an error.
 */
double edge_width(const std::vector<double>& profile, const GridSpec& grid, double edge_location,
                  const EdgeOptions& opt = {});

/// Foreground/background masks for a double-slit target: fg = slit cores,
/// bg = flanking bands clear of the slits (between 1 and 3 slit-widths
/// outside each slit center).
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> slit_region_masks(
    const GridSpec& grid, double a, double d);

}  // namespace gsim
