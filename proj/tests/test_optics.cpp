#include <doctest.h>

#include <cmath>
#include <complex>
#include <iostream>
#include <vector>

#include "ghostsim/optics.hpp"
#include "ghostsim/speckle.hpp"

using namespace gsim;

namespace {

constexpr double kLambda = 650e-9;
constexpr double kPi = 3.14159265358979323846;

/// Focal length making lambda * F = n * pitch^2, the grid's exact-transform point.
double exact_f(const GridSpec& g) { return g.n * g.pitch * g.pitch / kLambda; }

ComplexField random_field(const GridSpec& g, std::uint64_t seed) {
    ComplexField f = make_field(g, kLambda);
    const CounterRng rng(seed, 0);
    for (int i = 0; i < g.n; ++i) f.amp[i] = rng.circular_gaussian(static_cast<std::uint64_t>(i));
    return f;
}

int count_open(const ObjectMask& m) {
    int k = 0;
    for (const auto& t : m.transmission)
        if (std::abs(t) > 0.5) ++k;
    return k;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= double(a.size());
    mb /= double(b.size());
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("slit masks cover half-open supports") {
    const GridSpec g = make_grid(1024, 10e-6);
    const ObjectMask slit = make_single_slit(g, 0.2e-3);
    CHECK(count_open(slit) == 20);
    CHECK(std::abs(slit.transmission[g.index_of(0.0)]) == 1.0);

    const ObjectMask dbl = make_double_slit(g, 0.2e-3, 0.6e-3);
    CHECK(count_open(dbl) == 40);
    CHECK(std::abs(dbl.transmission[g.index_of(0.0)]) == 0.0);
    CHECK(std::abs(dbl.transmission[g.index_of(0.3e-3)]) == 1.0);
    CHECK(std::abs(dbl.transmission[g.index_of(-0.3e-3)]) == 1.0);

    const ObjectMask ring = make_ring_section(g, 0.8e-3, 0.2e-3);
    CHECK(count_open(ring) == 40);
    CHECK(std::abs(ring.transmission[g.index_of(0.4e-3)]) == 1.0);
    CHECK(std::abs(ring.transmission[g.index_of(0.0)]) == 0.0);

    CHECK_THROWS_AS(make_double_slit(g, 0.2e-3, 0.1e-3), std::invalid_argument);
    CHECK_THROWS_AS(make_uniform_mask(g, 1.5), std::invalid_argument);

    ObjectMask bad = make_uniform_mask(g);
    bad.transmission[0] = 2.0;
    CHECK_THROWS_AS(validate_mask(bad), std::invalid_argument);
}

TEST_CASE("free space and lenses conserve power") {
    const GridSpec g = make_grid(512, 10e-6);
    const ComplexField f = random_field(g, 1);
    const double p0 = total_power(f);
    const ComplexField fz = fresnel_propagate(f, 0.05);
    CHECK(std::abs(total_power(fz) / p0 - 1.0) <= 1e-10);
    const ComplexField fl = apply_thin_lens(f, 0.2);
    CHECK(std::abs(total_power(fl) / p0 - 1.0) <= 1e-10);
}

TEST_CASE("a plane wave is an eigenfunction of free-space propagation") {
    const GridSpec g = make_grid(256, 20e-6);
    ComplexField f = make_field(g, kLambda);
    f.amp.assign(g.samples(), cplx{1.0, 0.0});
    const ComplexField out = fresnel_propagate(f, 0.1);
    for (int i = 0; i < g.n; ++i) CHECK(std::abs(out.amp[i] - cplx{1.0, 0.0}) < 1e-12);
}

TEST_CASE("gaussian beam width follows the diffraction law") {
    const GridSpec g = make_grid(2048, 10e-6);
    const double w0 = 200e-6;
    const double zr = kPi * w0 * w0 / kLambda;
    ComplexField f = make_field(g, kLambda);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.coord(i) / w0;
        f.amp[i] = std::exp(-x * x);
    }
    auto width = [&](const ComplexField& fld) {
        double s = 0, sx2 = 0;
        for (int i = 0; i < g.n; ++i) {
            const double I = std::norm(fld.amp[i]);
            s += I;
            sx2 += I * g.coord(i) * g.coord(i);
        }
        return 2.0 * std::sqrt(sx2 / s);
    };
    CHECK(width(f) == doctest::Approx(w0).epsilon(0.005));
    const ComplexField out = fresnel_propagate(f, zr);
    CHECK(width(out) == doctest::Approx(std::sqrt(2.0) * w0).epsilon(0.01));
}

TEST_CASE("free-space steps compose") {
    const GridSpec g = make_grid(256, 20e-6);
    const ComplexField f = random_field(g, 2);
    const ComplexField two = fresnel_propagate(fresnel_propagate(f, 0.03), 0.07);
    const ComplexField one = fresnel_propagate(f, 0.1);
    for (int i = 0; i < g.n; ++i) CHECK(std::abs(two.amp[i] - one.amp[i]) < 1e-12);
}

TEST_CASE("two lenses of focal f equal one of f/2") {
    const GridSpec g = make_grid(256, 20e-6);
    const ComplexField f = random_field(g, 3);
    const ComplexField two = apply_thin_lens(apply_thin_lens(f, 0.4), 0.4);
    const ComplexField one = apply_thin_lens(f, 0.2);
    for (int i = 0; i < g.n; ++i) CHECK(std::abs(two.amp[i] - one.amp[i]) < 1e-12);
}

TEST_CASE("at the exact-transform focal length the 2f stage is a scaled transform") {
    const GridSpec g = make_grid(256, 20e-6);
    const double F = exact_f(g);
    const int shift = 12;
    ComplexField f = make_field(g, kLambda);
    f.amp[g.n / 2 + shift] = 1.0;  // impulse at x0 = shift * pitch
    ComplexField out = fresnel_propagate(f, F);
    out = apply_thin_lens(out, F);
    out = fresnel_propagate(out, F);

    // Linear-phase kernel exp(-2 pi i x x0 / (lambda F)) with one fitted
    // complex constant; uniform magnitude 1/sqrt(n).
    const double x0 = shift * g.pitch;
    const cplx c_fit =
        out.amp[g.n / 2] / std::polar(1.0, -2.0 * kPi * g.coord(g.n / 2) * x0 / (kLambda * F));
    CHECK(std::abs(c_fit) == doctest::Approx(1.0 / std::sqrt(double(g.n))).epsilon(1e-9));
    for (int i = 0; i < g.n; ++i) {
        const cplx kernel = std::polar(1.0, -2.0 * kPi * g.coord(i) * x0 / (kLambda * F));
        CHECK(std::abs(out.amp[i] - c_fit * kernel) < 1e-6 * std::abs(c_fit));
    }
}

TEST_CASE("a centered point source collimates through the 2f stage") {
    const GridSpec g = make_grid(256, 20e-6);
    const double F = exact_f(g);
    ComplexField f = make_field(g, kLambda);
    f.amp[g.n / 2] = 1.0;
    ComplexField out = fresnel_propagate(f, F);
    out = apply_thin_lens(out, F);
    out = fresnel_propagate(out, F);
    for (int i = 1; i < g.n; ++i) CHECK(std::abs(out.amp[i] - out.amp[0]) < 1e-9);
    // Residual wavefront tilt across the full grid, in radians.
    const double phase_span = std::abs(std::arg(out.amp[g.n - 1] / out.amp[0]));
    CHECK(phase_span < 1e-6);
}

TEST_CASE("aliasing diagnostic fires only beyond the bound") {
    const GridSpec g = make_grid(256, 20e-6);
    const double bound = g.n * g.pitch * g.pitch / kLambda;
    std::vector<std::string> captured;
    set_diagnostic_handler([&](const std::string& m) { captured.push_back(m); });
    const ComplexField f = random_field(g, 4);
    (void)fresnel_propagate(f, bound);
    CHECK(captured.empty());
    (void)fresnel_propagate(f, bound * 1.01);
    CHECK(captured.size() == 1);
    set_diagnostic_handler([](const std::string& m) { std::cerr << "[ghostsim] " << m << "\n"; });
}

TEST_CASE("imaging conditions: consistent geometry satisfies all three") {
    const double F = 0.6301538461538462;  // exact-transform F for n=1024, 20 um
    ImagingGeometry geo;
    geo.z = F;
    geo.f = geo.f1 = geo.f2 = F;
    geo.L1 = 0.02;
    geo.L2 = 0.02;
    geo.z1 = F - geo.L1;
    geo.z2 = 2 * F - geo.L2;
    geo.z3 = 2 * F;
    const ConditionReport rep = check_imaging_conditions(geo);
    for (int c = 0; c < 3; ++c) {
        CHECK(rep.residual[c] <= 1e-12);
        CHECK(rep.satisfied[c]);
    }
    CHECK(rep.all());
}

TEST_CASE("imaging conditions: a relay violating the lens equation is reported") {
    ImagingGeometry geo;
    geo.z = 0.211;
    geo.z1 = 0.300;
    geo.z2 = 0.390;
    geo.z3 = 0.2438;
    geo.f = 0.150;
    geo.f1 = 0.400;
    geo.f2 = 0.250;
    const ConditionReport rep = check_imaging_conditions(geo);
    CHECK(rep.residual[0] == doctest::Approx(2.665825287).epsilon(1e-6));
    CHECK_FALSE(rep.satisfied[0]);
    CHECK_FALSE(rep.all());
}

TEST_CASE("train validation") {
    OpticalTrain t;
    t.wavelength = kLambda;
    CHECK_THROWS_AS(validate_train(t), std::invalid_argument);
    t.elements = {FreeSpace{0.1}};
    CHECK_THROWS_AS(validate_train(t), std::invalid_argument);  // no detector
    t.elements = {DetectorPlane{"d"}, FreeSpace{0.1}};
    CHECK_THROWS_AS(validate_train(t), std::invalid_argument);  // detector not last
    t.elements = {FreeSpace{-0.1}, DetectorPlane{"d"}};
    CHECK_THROWS_AS(validate_train(t), std::invalid_argument);
    t.elements = {FreeSpace{0.1}, ThinLens{0.2}, DetectorPlane{"d"}};
    CHECK_NOTHROW(validate_train(t));
}

TEST_CASE("run_arm applies elements in order and needs a seed only for halo layers") {
    const GridSpec g = make_grid(256, 20e-6);
    const double F = exact_f(g);
    const ComplexField f = random_field(g, 5);

    OpticalTrain t;
    t.wavelength = kLambda;
    t.elements = {FreeSpace{F}, ThinLens{F}, FreeSpace{F}, DetectorPlane{"d"}};
    const ComplexField manual =
        fresnel_propagate(apply_thin_lens(fresnel_propagate(f, F), F), F);
    const ComplexField out = run_arm(f, t);
    for (int i = 0; i < g.n; ++i) CHECK(out.amp[i] == manual.amp[i]);

    ScatteringLayer halo;
    auto [a, b] = ballistic_fraction(100.0, 0.01);
    halo.alpha = a;
    halo.beta = b;
    halo.delta_x = 0.2e-3;
    halo.thickness = 0.01;
    halo.diffuse_halo = true;
    OpticalTrain th;
    th.wavelength = kLambda;
    th.elements = {ScatterElement{halo, 1}, DetectorPlane{"d"}};
    CHECK_THROWS_AS(run_arm(f, th), std::invalid_argument);
    const FrameSeed seed = derive_frame_seed(9, 0);
    CHECK_NOTHROW(run_arm(f, th, &seed));
}

TEST_CASE("matched arms see the same speckle up to the parity flip") {
    const GridSpec g = make_grid(256, 20e-6);
    const double F = exact_f(g);
    SourceSpec src;
    src.grid = g;
    src.aperture_width = 1.2e-3;

    OpticalTrain ref;
    ref.wavelength = kLambda;
    ref.elements = {FreeSpace{F}, ThinLens{F}, FreeSpace{F}, DetectorPlane{"ref"}};
    OpticalTrain test;
    test.wavelength = kLambda;
    test.elements = {FreeSpace{F},     ThinLens{F},      FreeSpace{F},
                     FreeSpace{2 * F}, ThinLens{F},      FreeSpace{2 * F},
                     DetectorPlane{"test"}};

    for (int fr = 0; fr < 5; ++fr) {
        const ComplexField s = generate_frame(src, derive_frame_seed(17, fr), kLambda);
        const ComplexField er = run_arm(s, ref);
        const ComplexField et = run_arm(s, test);
        std::vector<double> ir(g.samples()), it_flipped(g.samples());
        for (int i = 0; i < g.n; ++i) ir[i] = std::norm(er.amp[i]);
        IntensityFrame it{g, std::vector<double>(g.samples())};
        for (int i = 0; i < g.n; ++i) it.values[i] = std::norm(et.amp[i]);
        const IntensityFrame itf = flip(it);
        for (int i = 0; i < g.n; ++i) it_flipped[i] = itf.values[i];
        CHECK(pearson(ir, it_flipped) >= 0.99);
    }
}
