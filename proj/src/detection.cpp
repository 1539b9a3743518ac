#include "ghostsim/detection.hpp"

#include <cmath>
#include <stdexcept>

namespace gsim {

void validate_detector(const DetectorSpec& spec, const GridSpec& grid) {
    if (spec.extent < 0.0) throw std::invalid_argument("DetectorSpec: extent must be >= 0");
    if (spec.extent > grid.extent() * (1.0 + 1e-9))
        throw std::invalid_argument("DetectorSpec: extent exceeds the grid");
    switch (spec.kind) {
        case DetectorKind::Camera: {
            if (!(spec.pixel_pitch > 0.0))
                throw std::invalid_argument("DetectorSpec: camera needs pixel_pitch > 0");
            if (spec.pixel_pitch < grid.pitch * (1.0 - 1e-9))
                throw std::invalid_argument("DetectorSpec: pixel_pitch must be >= grid pitch");
            const double ratio = spec.pixel_pitch / grid.pitch;
            if (std::abs(ratio - std::lround(ratio)) > 1e-9 * ratio)
                throw std::invalid_argument(
                    "DetectorSpec: pixel_pitch must be an integer multiple of grid pitch");
            break;
        }
        case DetectorKind::Point:
            if (std::abs(spec.x) > grid.extent() / 2)
                throw std::invalid_argument("DetectorSpec: point x outside grid extent");
            break;
        case DetectorKind::Bucket:
            break;
    }
}

double bucket_value(const IntensityFrame& frame, const DetectorSpec& spec) {
    if (spec.kind != DetectorKind::Bucket)
        throw std::invalid_argument("bucket_value: detector is not a bucket");
    validate_detector(spec, frame.grid);
    const double half = (spec.extent > 0.0 ? spec.extent : frame.grid.extent()) / 2.0;
    double s = 0.0;
    for (int i = 0; i < frame.grid.n; ++i) {
        const double x = frame.grid.coord(i);
        if (x >= -half && x < half) s += frame.values[i];
    }
    return s * frame.grid.pitch;
}

IntensityFrame camera_bin(const IntensityFrame& frame, const DetectorSpec& spec) {
    if (spec.kind != DetectorKind::Camera)
        throw std::invalid_argument("camera_bin: detector is not a camera");
    validate_detector(spec, frame.grid);
    if (frame.grid.dim != 1) throw std::invalid_argument("camera_bin: 1-D frames only");
    const int ratio = static_cast<int>(std::lround(spec.pixel_pitch / frame.grid.pitch));
    if (frame.grid.n % ratio != 0)
        throw std::invalid_argument("camera_bin: binning ratio must divide the sample count");

    const int n_out = frame.grid.n / ratio;
    IntensityFrame out{make_grid(n_out, spec.pixel_pitch, 1), std::vector<double>(n_out)};
    for (int j = 0; j < n_out; ++j) {
        double s = 0.0;
        for (int k = 0; k < ratio; ++k) s += frame.values[static_cast<std::size_t>(j) * ratio + k];
        out.values[j] = s / ratio;
    }
    return out;
}

double point_value(const IntensityFrame& frame, const DetectorSpec& spec) {
    if (spec.kind != DetectorKind::Point)
        throw std::invalid_argument("point_value: detector is not a point");
    validate_detector(spec, frame.grid);
    return frame.values[frame.grid.index_of(spec.x)];
}

}  // namespace gsim
