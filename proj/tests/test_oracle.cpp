#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "ghostsim/metrics.hpp"
#include "ghostsim/oracle.hpp"
#include "ghostsim/scattering.hpp"

using namespace gsim;

namespace {

constexpr double kLambda = 650e-9;
constexpr double kPi = 3.14159265358979323846;

ScatteringLayer split_layer(double mu_s, double L, double delta_x) {
    auto [a, b] = ballistic_fraction(mu_s, L);
    ScatteringLayer layer;
    layer.alpha = a;
    layer.beta = b;
    layer.delta_x = delta_x;
    layer.thickness = L;
    return layer;
}

/// Scene with both screens at the object plane of an exact-transform layout:
/// shared 2f stage to the object/reference plane, then a 2f-2f relay.
SceneSpec object_plane_scene(int n, double pitch, double aperture, const ScatteringLayer& l1,
                             const ScatteringLayer& l2, const ObjectMask& object) {
    const double F = n * pitch * pitch / kLambda;
    SceneSpec sc;
    sc.object = object;
    sc.layer1 = l1;
    sc.layer2 = l2;
    sc.source.grid = make_grid(n, pitch);
    sc.source.aperture_width = aperture;

    sc.reference_train.wavelength = kLambda;
    sc.reference_train.elements = {FreeSpace{F}, ThinLens{F}, FreeSpace{F}, DetectorPlane{"r"}};

    sc.test_train.wavelength = kLambda;
    sc.test_train.elements = {FreeSpace{F},
                              ThinLens{F},
                              FreeSpace{F},
                              ScatterElement{l1, 1},
                              MaskElement{object},
                              ScatterElement{l2, 2},
                              FreeSpace{2 * F},
                              ThinLens{F},
                              FreeSpace{2 * F},
                              DetectorPlane{"t"}};
    return sc;
}

/// Direct field-covariance quadrature that never touches the propagation or
/// convolution code: analytic transform kernels for the 2f stage, an index
/// flip for the relay, and an O(n^2) convolution sum for the screens.
std::vector<double> quadrature_delta_g2(const SceneSpec& sc) {
    const GridSpec g = sc.source.grid;
    const int n = g.n;

    auto layer_apply = [&](const ScatteringLayer& layer, const std::vector<cplx>& f) {
        if (layer.thickness == 0.0) return f;
        const auto psf = gaussian_psf(layer.delta_x, g);
        std::vector<cplx> out(n);
        for (int i = 0; i < n; ++i) {
            cplx conv{0.0, 0.0};
            for (int k = 0; k < n; ++k) {
                const int o = i - k + n / 2;
                if (o < 0 || o >= n) continue;
                conv += psf[o] * f[k];
            }
            out[i] = layer.alpha * f[i] + layer.beta * conv * g.pitch;
        }
        return out;
    };

    std::vector<cplx> cov(static_cast<std::size_t>(n) * n, cplx{0.0, 0.0});
    std::vector<cplx> kernel(n), obj_field(n);
    for (int j = 0; j < n; ++j) {
        if (std::abs(g.coord(j)) > sc.source.aperture_width / 2) continue;
        // 2f stage output for a unit impulse at source sample j.
        for (int i = 0; i < n; ++i)
            kernel[i] = std::polar(1.0 / std::sqrt(double(n)),
                                   -2.0 * kPi * double(i - n / 2) * double(j - n / 2) / n);
        // Reference arm stops here; the test arm continues through the
        // screens, the object, and the inverting relay.
        obj_field = layer_apply(sc.layer1, kernel);
        for (int i = 0; i < n; ++i) obj_field[i] *= sc.object.transmission[i];
        obj_field = layer_apply(sc.layer2, obj_field);
        for (int ir = 0; ir < n; ++ir) {
            const cplx hr = std::conj(kernel[ir]) * sc.source.mean_intensity;
            for (int it = 0; it < n; ++it) cov[ir * n + it] += hr * obj_field[(n - it) % n];
        }
    }
    std::vector<double> dg(cov.size());
    for (std::size_t i = 0; i < cov.size(); ++i) dg[i] = std::norm(cov[i]);
    return dg;
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

}  // namespace

TEST_CASE("covariance composition matches a direct quadrature") {
    const int n = 64;
    const double pitch = 20e-6;
    const ScatteringLayer l1 = split_layer(std::log(2.0) / 0.01, 0.01, 0.12e-3);
    const ScatteringLayer l2 = split_layer(40.0, 0.01, 0.10e-3);
    const ObjectMask object = make_double_slit(make_grid(n, pitch), 0.12e-3, 0.36e-3);
    const SceneSpec sc = object_plane_scene(n, pitch, 0.8e-3, l1, l2, object);

    const OraclePrediction pred = OraclePrediction::compute(sc);
    REQUIRE(pred.grid_r().n == n);
    REQUIRE(pred.grid_t().n == n);

    const std::vector<double> direct = quadrature_delta_g2(sc);

    // Shape comparison: both normalized to their peak, pointwise to 1e-8.
    std::vector<double> lib(static_cast<std::size_t>(n) * n);
    for (int ir = 0; ir < n; ++ir)
        for (int it = 0; it < n; ++it) lib[ir * n + it] = pred.delta_g2_at(ir, it);
    const double peak_lib = max_of(lib), peak_dir = max_of(direct);
    REQUIRE(peak_lib > 0.0);
    REQUIRE(peak_dir > 0.0);
    for (std::size_t i = 0; i < lib.size(); ++i)
        CHECK(std::abs(lib[i] / peak_lib - direct[i] / peak_dir) <= 1e-8);
}

TEST_CASE("with no scattering the camera prediction is the magnified transmission") {
    const GridSpec g = make_grid(128, 20e-6);
    const ObjectMask object = make_double_slit(g, 0.16e-3, 0.48e-3);
    SceneSpec sc = object_plane_scene(128, 20e-6, 1.0e-3, ScatteringLayer{}, ScatteringLayer{},
                                      object);
    const std::vector<double> img = predict_ccd_image(sc, g);
    for (int i = 0; i < g.n; ++i) {
        const double t2 = std::norm(object.transmission[i]);
        CHECK(std::abs(img[i] - t2) <= 1e-12);
    }
}

TEST_CASE("camera prediction is symmetric under swapping the two screens") {
    const GridSpec g = make_grid(128, 20e-6);
    const ObjectMask object = make_double_slit(g, 0.16e-3, 0.48e-3);
    const ScatteringLayer l1 = split_layer(90.0, 0.015, 0.2e-3);
    const ScatteringLayer l2 = split_layer(50.0, 0.025, 0.35e-3);
    SceneSpec ab = object_plane_scene(128, 20e-6, 1.0e-3, l1, l2, object);
    SceneSpec ba = object_plane_scene(128, 20e-6, 1.0e-3, l2, l1, object);
    const std::vector<double> img_ab = predict_ccd_image(ab, g);
    const std::vector<double> img_ba = predict_ccd_image(ba, g);
    for (std::size_t i = 0; i < img_ab.size(); ++i)
        CHECK(img_ab[i] == doctest::Approx(img_ba[i]).epsilon(1e-12));
}

TEST_CASE("a clear object gives a flat camera prediction away from the edges") {
    const GridSpec g = make_grid(256, 20e-6);
    const ObjectMask object = make_uniform_mask(g);
    const ScatteringLayer l1 = split_layer(90.0, 0.015, 0.2e-3);
    const ScatteringLayer l2 = split_layer(50.0, 0.025, 0.3e-3);
    SceneSpec sc = object_plane_scene(256, 20e-6, 1.0e-3, l1, l2, object);
    const std::vector<double> img = predict_ccd_image(sc, g);
    const double center = img[g.n / 2];
    for (int i = g.n / 3; i < 2 * g.n / 3; ++i)
        CHECK(img[i] == doctest::Approx(center).epsilon(0.01));
}

TEST_CASE("an opaque object predicts zero correlation everywhere") {
    const GridSpec g = make_grid(64, 20e-6);
    ObjectMask opaque{g, std::vector<cplx>(g.samples(), cplx{0.0, 0.0}), "opaque"};
    const ScatteringLayer l1 = split_layer(90.0, 0.01, 0.12e-3);
    SceneSpec sc = object_plane_scene(64, 20e-6, 0.8e-3, l1, ScatteringLayer{}, opaque);
    const OraclePrediction pred = OraclePrediction::compute(sc);
    for (int ir = 0; ir < g.n; ++ir)
        for (int it = 0; it < g.n; ++it) CHECK(pred.delta_g2_at(ir, it) == 0.0);
    for (double v : predict_ccd_image(sc, g)) CHECK(v == 0.0);
}

TEST_CASE("bucket prediction loses slit contrast as the exit blur widens") {
    const int n = 128;
    const double pitch = 20e-6;
    const GridSpec g = make_grid(n, pitch);
    const double a = 0.16e-3, d = 0.48e-3;
    const ObjectMask object = make_double_slit(g, a, d);
    const ScatteringLayer l1 = split_layer(std::log(2.0) / 0.01, 0.01, 0.15e-3);
    const auto [fg, bg] = slit_region_masks(g, a, d);

    double last = 2.0;
    for (double dx2 : {0.1e-3, 0.3e-3, 0.6e-3}) {
        const ScatteringLayer l2 = split_layer(std::log(2.0) / 0.01, 0.01, dx2);
        SceneSpec sc = object_plane_scene(n, pitch, 1.0e-3, l1, l2, object);
        const std::vector<double> img = predict_bucket_image(sc);
        const double vis = visibility(img, fg, bg);
        CHECK(vis < last);
        CHECK(vis > 0.0);
        last = vis;
    }
}

TEST_CASE("oracle rejects scenes outside the deterministic model") {
    const GridSpec g = make_grid(64, 20e-6);
    const ObjectMask object = make_double_slit(g, 0.12e-3, 0.36e-3);
    ScatteringLayer halo = split_layer(90.0, 0.01, 0.12e-3);
    halo.diffuse_halo = true;
    SceneSpec sc = object_plane_scene(64, 20e-6, 0.8e-3, halo, ScatteringLayer{}, object);
    CHECK_THROWS_AS(OraclePrediction::compute(sc), std::invalid_argument);

    SceneSpec phase = object_plane_scene(64, 20e-6, 0.8e-3, ScatteringLayer{}, ScatteringLayer{},
                                         object);
    phase.source.statistics = SourceStatistics::PhaseOnly;
    CHECK_THROWS_AS(OraclePrediction::compute(phase), std::invalid_argument);
}
