#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "ghostsim/grid.hpp"
#include "ghostsim/rng.hpp"
#include "ghostsim/scattering.hpp"

namespace gsim {

/// Complex transmission screen, |t| <= 1 everywhere. A slit of width a covers
/// the half-open support [-a/2, a/2), so an integer a/pitch passes exactly
/// a/pitch samples.
struct ObjectMask {
    GridSpec grid;
    std::vector<cplx> transmission;
    std::string descriptor;
};

void validate_mask(const ObjectMask& m);

ObjectMask make_uniform_mask(const GridSpec& grid, double value = 1.0);
ObjectMask make_single_slit(const GridSpec& grid, double a);
ObjectMask make_double_slit(const GridSpec& grid, double a, double d);
/// 1-D section through a ring: two bars of width stroke centered at +-diameter/2.
ObjectMask make_ring_section(const GridSpec& grid, double diameter, double stroke);
/// Middle row of an 8-bit grayscale image (PGM or PNG), mapped linearly to [0,1].
/// The image width must equal grid.n.
ObjectMask mask_from_image(const GridSpec& grid, const std::string& path);

struct FreeSpace {
    double z = 0.0;
};
struct ThinLens {
    double f = 0.0;
};
struct MaskElement {
    ObjectMask mask;
};
struct ScatterElement {
    ScatteringLayer layer;
    // Noise channel for the diffuse halo; must be unique across both arms of
    // an experiment so per-frame draws never collide.
    std::uint32_t noise_channel = 0;
};
struct DetectorPlane {
    std::string label;
};

using TrainElement = std::variant<FreeSpace, ThinLens, MaskElement, ScatterElement, DetectorPlane>;

struct OpticalTrain {
    std::vector<TrainElement> elements;
    double wavelength = 0.0;
};

/// Exactly one DetectorPlane, as the final element; z > 0, f > 0.
void validate_train(const OpticalTrain& train);

/// Handler for non-fatal numerical diagnostics (default: stderr).
void set_diagnostic_handler(std::function<void(const std::string&)> handler);

namespace detail {
/// Route a message through the installed diagnostic handler.
void emit_diagnostic(const std::string& message);
}  // namespace detail

/**
 * Paraxial free-space step via the spectral transfer function
 * exp(-i pi lambda z nu^2) on the periodic grid. Exactly unitary, so total
 * power is conserved to rounding. Emits a diagnostic when z exceeds the
 * aliasing bound n*pitch^2/lambda (quadratic phase under-sampled at the band
 * edge); propagation still proceeds on the periodic grid.
 */
ComplexField fresnel_propagate(const ComplexField& f, double z);

/// Multiply by the thin-lens phase exp(-i pi x^2 / (lambda focal)).
ComplexField apply_thin_lens(const ComplexField& f, double focal);

/// Sample-wise product with the mask transmission. Grids must match.
ComplexField apply_transmission(const ComplexField& f, const ObjectMask& m);

/// Named lengths of the two-arm layout used by the imaging conditions:
/// reference arm source -z- lens(f) -...- detector; test arm source -z1-
/// medium(L1) - lens(f1) - object - medium(L2) - z2 - lens(f2) - z3 - detector.
struct ImagingGeometry {
    double z = 0, z1 = 0, z2 = 0, z3 = 0;
    double f = 0, f1 = 0, f2 = 0;
    double L1 = 0, L2 = 0;
};

struct ConditionReport {
    // (i) relay lens equation, (ii) source-side chirp match, (iii) magnification
    double residual[3] = {0, 0, 0};
    bool satisfied[3] = {false, false, false};
    static constexpr double tolerance = 1e-9;
    bool all() const { return satisfied[0] && satisfied[1] && satisfied[2]; }
};

ConditionReport check_imaging_conditions(const ImagingGeometry& g);

/// Apply the train elements in order and return the field at the detector
/// plane. Scatter elements with a diffuse halo draw their per-frame noise from
/// the seed's stream for their noise channel; such trains require a seed.
ComplexField run_arm(const ComplexField& input, const OpticalTrain& train,
                     const FrameSeed* seed = nullptr);

}  // namespace gsim
