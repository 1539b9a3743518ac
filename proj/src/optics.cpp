#include "ghostsim/optics.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <tuple>

#include "ghostsim/fft.hpp"
#include "ghostsim/image_io.hpp"

namespace gsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::function<void(const std::string&)>& diagnostic_handler() {
    static std::function<void(const std::string&)> handler = [](const std::string& msg) {
        static std::mutex mtx;
        std::lock_guard<std::mutex> lock(mtx);
        std::cerr << "[ghostsim] " << msg << "\n";
    };
    return handler;
}

ObjectMask bars_mask(const GridSpec& grid, std::vector<std::pair<double, double>> supports,
                     std::string descriptor) {
    ObjectMask m{grid, std::vector<cplx>(grid.samples(), cplx{0.0, 0.0}), std::move(descriptor)};
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.coord(i);
        for (const auto& [lo, hi] : supports)
            if (x >= lo && x < hi) {
                m.transmission[i] = 1.0;
                break;
            }
    }
    return m;
}

}  // namespace

namespace detail {

void emit_diagnostic(const std::string& message) { diagnostic_handler()(message); }

}  // namespace detail

void validate_mask(const ObjectMask& m) {
    if (m.transmission.size() != m.grid.samples())
        throw std::invalid_argument("ObjectMask: transmission size does not match grid");
    for (const auto& t : m.transmission)
        if (std::abs(t) > 1.0 + 1e-12)
            throw std::invalid_argument("ObjectMask: |transmission| must be <= 1");
}

ObjectMask make_uniform_mask(const GridSpec& grid, double value) {
    if (value < 0.0 || value > 1.0)
        throw std::invalid_argument("make_uniform_mask: value must be in [0,1]");
    return ObjectMask{grid, std::vector<cplx>(grid.samples(), cplx{value, 0.0}), "uniform"};
}

ObjectMask make_single_slit(const GridSpec& grid, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("make_single_slit: width must be > 0");
    return bars_mask(grid, {{-a / 2, a / 2}}, "single-slit");
}

ObjectMask make_double_slit(const GridSpec& grid, double a, double d) {
    if (!(a > 0.0) || !(d > 0.0))
        throw std::invalid_argument("make_double_slit: width and separation must be > 0");
    if (d <= a) throw std::invalid_argument("make_double_slit: slits overlap (d <= a)");
    return bars_mask(grid, {{-d / 2 - a / 2, -d / 2 + a / 2}, {d / 2 - a / 2, d / 2 + a / 2}},
                     "double-slit");
}

ObjectMask make_ring_section(const GridSpec& grid, double diameter, double stroke) {
    if (!(diameter > 0.0) || !(stroke > 0.0))
        throw std::invalid_argument("make_ring_section: diameter and stroke must be > 0");
    return bars_mask(grid,
                     {{-diameter / 2 - stroke / 2, -diameter / 2 + stroke / 2},
                      {diameter / 2 - stroke / 2, diameter / 2 + stroke / 2}},
                     "ring");
}

ObjectMask mask_from_image(const GridSpec& grid, const std::string& path) {
    const GrayImage img = read_gray_image(path);
    if (img.width != grid.n)
        throw std::invalid_argument("mask_from_image: image width " + std::to_string(img.width) +
                                    " does not match grid n " + std::to_string(grid.n));
    ObjectMask m{grid, std::vector<cplx>(grid.samples()), "from-image-file"};
    const int row = img.height / 2;
    for (int i = 0; i < grid.n; ++i)
        m.transmission[i] = img.pixels[static_cast<std::size_t>(row) * img.width + i] / 255.0;
    return m;
}

void validate_train(const OpticalTrain& train) {
    if (!(train.wavelength > 0.0))
        throw std::invalid_argument("OpticalTrain: wavelength must be > 0");
    if (train.elements.empty()) throw std::invalid_argument("OpticalTrain: no elements");
    int detectors = 0;
    for (std::size_t i = 0; i < train.elements.size(); ++i) {
        const auto& el = train.elements[i];
        if (const auto* fs = std::get_if<FreeSpace>(&el)) {
            if (!(fs->z > 0.0) || !std::isfinite(fs->z))
                throw std::invalid_argument("OpticalTrain: FreeSpace z must be finite and > 0");
        } else if (const auto* ln = std::get_if<ThinLens>(&el)) {
            if (!(ln->f > 0.0) || !std::isfinite(ln->f))
                throw std::invalid_argument("OpticalTrain: ThinLens f must be finite and > 0");
        } else if (const auto* mk = std::get_if<MaskElement>(&el)) {
            validate_mask(mk->mask);
        } else if (const auto* sc = std::get_if<ScatterElement>(&el)) {
            validate_layer(sc->layer);
        } else if (std::holds_alternative<DetectorPlane>(el)) {
            ++detectors;
            if (i + 1 != train.elements.size())
                throw std::invalid_argument("OpticalTrain: DetectorPlane must be the final element");
        }
    }
    if (detectors != 1)
        throw std::invalid_argument("OpticalTrain: exactly one DetectorPlane required");
}

void set_diagnostic_handler(std::function<void(const std::string&)> handler) {
    diagnostic_handler() = std::move(handler);
}

ComplexField fresnel_propagate(const ComplexField& f, double z) {
    if (!(z > 0.0)) throw std::invalid_argument("fresnel_propagate: z must be > 0");
    if (f.grid.dim != 1) throw std::invalid_argument("fresnel_propagate: 1-D fields only");
    const int n = f.grid.n;
    const double bound = n * f.grid.pitch * f.grid.pitch / f.wavelength;
    // Trains are routinely designed with z exactly at the bound; tolerate rounding
    // of parsed lengths so only a genuine excess triggers the warning. Emit once
    // per step configuration: ensemble loops repeat the same step per frame.
    if (z > bound * (1.0 + 1e-9)) {
        static std::set<std::tuple<double, int, double, double>> warned;
        static std::mutex warned_mtx;
        bool fresh = false;
        {
            std::lock_guard<std::mutex> lock(warned_mtx);
            fresh = warned.insert({z, n, f.grid.pitch, f.wavelength}).second;
        }
        if (fresh)
            diagnostic_handler()("fresnel_propagate: z = " + std::to_string(z) +
                                 " m exceeds the aliasing bound n*pitch^2/lambda = " +
                                 std::to_string(bound) + " m; band-edge chirp is under-sampled");
    }
    ComplexField out = f;
    fft::forward(out.amp);
    for (int k = 0; k < n; ++k) {
        const double nu = fft::freq(k, n, f.grid.pitch);
        out.amp[k] *= std::polar(1.0, -kPi * f.wavelength * z * nu * nu);
    }
    fft::inverse(out.amp);
    return out;
}

ComplexField apply_thin_lens(const ComplexField& f, double focal) {
    if (!(focal > 0.0)) throw std::invalid_argument("apply_thin_lens: focal must be > 0");
    ComplexField out = f;
    for (int i = 0; i < f.grid.n; ++i) {
        const double x = f.grid.coord(i);
        out.amp[i] *= std::polar(1.0, -kPi * x * x / (f.wavelength * focal));
    }
    return out;
}

ComplexField apply_transmission(const ComplexField& f, const ObjectMask& m) {
    if (!(f.grid == m.grid))
        throw std::invalid_argument("apply_transmission: mask grid does not match field grid");
    ComplexField out = f;
    for (std::size_t i = 0; i < out.amp.size(); ++i) out.amp[i] *= m.transmission[i];
    return out;
}

ConditionReport check_imaging_conditions(const ImagingGeometry& g) {
    ConditionReport r;
    r.residual[0] = std::abs(1.0 / (g.z2 + g.L2) + 1.0 / g.z3 - 1.0 / g.f2);
    r.residual[1] =
        std::abs((1.0 - g.z / g.f) / g.f - (1.0 - (g.z1 + g.L1) / g.f1) / g.f1);
    r.residual[2] = std::abs(g.f1 / g.f - (g.z2 + g.L2) / g.z3);
    for (int i = 0; i < 3; ++i) r.satisfied[i] = r.residual[i] < ConditionReport::tolerance;
    return r;
}

ComplexField run_arm(const ComplexField& input, const OpticalTrain& train, const FrameSeed* seed) {
    validate_train(train);
    if (input.grid.dim != 1) throw std::invalid_argument("run_arm: 1-D fields only");
    ComplexField field = input;
    field.wavelength = train.wavelength;
    for (const auto& el : train.elements) {
        if (const auto* fs = std::get_if<FreeSpace>(&el)) {
            field = fresnel_propagate(field, fs->z);
        } else if (const auto* ln = std::get_if<ThinLens>(&el)) {
            field = apply_thin_lens(field, ln->f);
        } else if (const auto* mk = std::get_if<MaskElement>(&el)) {
            field = apply_transmission(field, mk->mask);
        } else if (const auto* sc = std::get_if<ScatterElement>(&el)) {
            if (sc->layer.diffuse_halo) {
                if (!seed)
                    throw std::invalid_argument("run_arm: diffuse_halo layer requires a frame seed");
                const CounterRng noise(seed->master_seed,
                                       CounterRng::stream_for(seed->frame_index, sc->noise_channel));
                field = apply_layer(field, sc->layer, &noise);
            } else {
                field = apply_layer(field, sc->layer);
            }
        } else if (const auto* det = std::get_if<DetectorPlane>(&el)) {
            field.plane_label = det->label;
        }
    }
    return field;
}

}  // namespace gsim
