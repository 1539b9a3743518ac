#pragma once

#include "ghostsim/grid.hpp"

namespace gsim {

enum class DetectorKind { Bucket, Camera, Point };

/**
 * Detector geometry. extent is the active width centered on the axis
 * (0 = full grid). Cameras bin by pixel_pitch, an integer multiple of the
 * grid pitch; points sample the nearest grid cell at x.
 */
struct DetectorSpec {
    DetectorKind kind = DetectorKind::Bucket;
    double x = 0.0;           // point only, meters
    double pixel_pitch = 0.0; // camera only, meters
    double extent = 0.0;      // meters; 0 = full grid
};

void validate_detector(const DetectorSpec& spec, const GridSpec& grid);

/// Integrated intensity over the active extent: sum(values) * pitch. The
/// window is half-open [-extent/2, extent/2), so an integer extent/pitch
/// covers exactly that many samples.
double bucket_value(const IntensityFrame& frame, const DetectorSpec& spec);

/// Mean-bin onto the camera pixel grid. Each output pixel is the mean of the
/// covered input samples, so values stay intensity-like for any ratio.
IntensityFrame camera_bin(const IntensityFrame& frame, const DetectorSpec& spec);

/// Intensity at the grid sample nearest spec.x.
double point_value(const IntensityFrame& frame, const DetectorSpec& spec);

}  // namespace gsim
