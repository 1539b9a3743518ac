#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "ghostsim/grid.hpp"
#include "ghostsim/rng.hpp"
#include "ghostsim/scattering.hpp"

using namespace gsim;

namespace {

ScatteringLayer split_layer(double mu_s, double L, double delta_x) {
    auto [a, b] = ballistic_fraction(mu_s, L);
    ScatteringLayer layer;
    layer.alpha = a;
    layer.beta = b;
    layer.delta_x = delta_x;
    layer.thickness = L;
    return layer;
}

ComplexField random_field(const GridSpec& g, std::uint64_t seed) {
    ComplexField f = make_field(g, 650e-9);
    const CounterRng rng(seed, 0);
    for (int i = 0; i < g.n; ++i) f.amp[i] = rng.circular_gaussian(static_cast<std::uint64_t>(i));
    return f;
}

}  // namespace

TEST_CASE("psf power normalization holds across widths and pitches") {
    for (double delta_x : {0.01e-3, 0.74e-3, 1.36e-3}) {
        for (double pitch : {5e-6, 10e-6, 20e-6}) {
            const GridSpec g = make_grid(4096, pitch);
            const auto psf = gaussian_psf(delta_x, g);
            double s = 0.0;
            for (double v : psf) s += v * v;
            CHECK(std::abs(s * pitch - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("psf shape: 1/e amplitude radius and amplitude sum") {
    const GridSpec g = make_grid(1024, 10e-6);
    const double delta_x = 0.2e-3;  // exactly 20 samples
    const auto psf = gaussian_psf(delta_x, g);
    const int c = g.n / 2;
    CHECK(psf[c + 20] / psf[c] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(psf[c - 20] == psf[c + 20]);

    // Amplitude sum approaches the continuous value (2 pi)^(1/4) sqrt(delta_x).
    double s = 0.0;
    for (double v : psf) s += v;
    s *= g.pitch;
    const double cont = std::pow(2.0 * 3.14159265358979323846, 0.25) * std::sqrt(delta_x);
    CHECK(s == doctest::Approx(cont).epsilon(1e-8));
    CHECK(detail::psf_kernel(delta_x, g)->amp_sum == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("psf rejects sub-sample widths") {
    const GridSpec g = make_grid(256, 20e-6);
    CHECK_THROWS_AS(gaussian_psf(4e-6, g), std::invalid_argument);
    CHECK_NOTHROW(gaussian_psf(5e-6, g));
    CHECK_NOTHROW(gaussian_psf(0.01e-3, g));
    CHECK_THROWS_AS(gaussian_psf(0.0, g), std::invalid_argument);
}

TEST_CASE("ballistic split follows the exponential attenuation law") {
    auto [a, b] = ballistic_fraction(std::log(2.0), 1.0);
    CHECK(a == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(b == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(a * a + b * b == doctest::Approx(1.0).epsilon(1e-14));

    auto [a0, b0] = ballistic_fraction(100.0, 0.0);
    CHECK(a0 == 1.0);
    CHECK(b0 == 0.0);

    // Scattered-to-ballistic power ratio for mu_s = 1.64/cm over 4 cm.
    auto [ab, bb] = ballistic_fraction(164.0, 0.04);
    const double ratio = (bb * bb) / (ab * ab);
    CHECK(ratio == doctest::Approx(std::exp(164.0 * 0.04) - 1.0).epsilon(1e-12));
    CHECK(std::abs(ratio - 694.0) / 694.0 < 0.03);

    CHECK_THROWS_AS(ballistic_fraction(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ballistic_fraction(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("layer validation") {
    ScatteringLayer bad;
    bad.alpha = 1.0;
    bad.beta = 1.0;
    CHECK_THROWS_AS(validate_layer(bad), std::invalid_argument);

    ScatteringLayer zero_thick = split_layer(164.0, 0.01, 0.4e-3);
    zero_thick.thickness = 0.0;
    CHECK_THROWS_AS(validate_layer(zero_thick), std::invalid_argument);

    ScatteringLayer no_width = split_layer(164.0, 0.01, 0.0);
    CHECK_THROWS_AS(validate_layer(no_width), std::invalid_argument);

    CHECK_NOTHROW(validate_layer(split_layer(164.0, 0.01, 0.4e-3)));
    CHECK_NOTHROW(validate_layer(ScatteringLayer{}));
}

TEST_CASE("broadening model: direct constants, power laws, clamping") {
    MediumParams p;
    p.k_beta = 0.3;
    p.k_x = 0.034;
    p.d_x = 1.0;  // delta_x = k_x * L
    auto [bs, dx] = broadening_model(p, 0.02);
    CHECK(bs == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(dx == doctest::Approx(6.8e-4).epsilon(1e-14));

    auto [bs40, dx40] = broadening_model(p, 0.04);
    CHECK(dx40 == doctest::Approx(1.36e-3).epsilon(1e-14));

    p.k_beta = 1.5;
    CHECK(broadening_model(p, 0.02).first == 1.0);

    p.k_beta = -0.1;
    CHECK_THROWS_AS(broadening_model(p, 0.02), std::invalid_argument);
    p.k_beta = 0.3;
    CHECK_THROWS_AS(broadening_model(p, -1.0), std::invalid_argument);

    MediumParams q;
    q.k_x = 2.0;
    q.a_x = 1.0;
    q.particle_diameter = 3.0;
    q.b_x = 1.0;
    q.wavelength = 2.0;
    CHECK(broadening_model(q, 1.0).second == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("zero-thickness layer is the identity") {
    const GridSpec g = make_grid(256, 20e-6);
    const ComplexField f = random_field(g, 1);
    ScatteringLayer layer;  // alpha = 1, thickness 0
    const ComplexField out = apply_layer(f, layer);
    for (int i = 0; i < g.n; ++i) CHECK(out.amp[i] == f.amp[i]);
}

TEST_CASE("impulse response is the scattering kernel") {
    const GridSpec g = make_grid(512, 10e-6);
    const ScatteringLayer layer = split_layer(std::log(2.0) / 0.01, 0.01, 0.2e-3);
    ComplexField f = make_field(g, 650e-9);
    f.amp[g.n / 2] = 1.0 / g.pitch;  // unit-weight impulse at x = 0
    const ComplexField out = apply_layer(f, layer);
    const auto psf = gaussian_psf(layer.delta_x, g);
    const double beta = std::abs(layer.beta);
    for (int i = 0; i < g.n; ++i) {
        if (i == g.n / 2) continue;
        CHECK(std::abs(out.amp[i] - beta * psf[i]) < 1e-10);
    }
    const cplx expect_center = layer.alpha / g.pitch + layer.beta * psf[g.n / 2];
    CHECK(std::abs(out.amp[g.n / 2] - expect_center) < 1e-10);
}

TEST_CASE("plane-wave response is alpha + beta * amplitude sum") {
    const GridSpec g = make_grid(1024, 10e-6);
    const ScatteringLayer layer = split_layer(std::log(2.0) / 0.01, 0.01, 0.2e-3);
    ComplexField f = make_field(g, 650e-9);
    f.amp.assign(g.samples(), cplx{1.0, 0.0});
    const ComplexField out = apply_layer(f, layer);
    const double s = detail::psf_kernel(layer.delta_x, g)->amp_sum;
    const cplx expect = layer.alpha + layer.beta * s;
    // Interior samples, clear of the zero-padded boundary.
    for (int i = g.n / 4; i < 3 * g.n / 4; ++i) CHECK(std::abs(out.amp[i] - expect) < 1e-12);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(out.amp[g.n / 2] - cplx{inv_sqrt2 * (1.0 + s), 0.0}) < 1e-12);
}

TEST_CASE("layer application is linear") {
    const GridSpec g = make_grid(256, 20e-6);
    const ScatteringLayer layer = split_layer(80.0, 0.02, 0.3e-3);
    const ComplexField f = random_field(g, 2), h = random_field(g, 3);
    const cplx a{0.7, -0.2}, b{-1.1, 0.4};
    ComplexField combo = make_field(g, 650e-9);
    for (int i = 0; i < g.n; ++i) combo.amp[i] = a * f.amp[i] + b * h.amp[i];
    const ComplexField lhs = apply_layer(combo, layer);
    const ComplexField rf = apply_layer(f, layer), rh = apply_layer(h, layer);
    for (int i = 0; i < g.n; ++i)
        CHECK(std::abs(lhs.amp[i] - (a * rf.amp[i] + b * rh.amp[i])) < 1e-12);
}

TEST_CASE("successive layers commute on interior-supported fields") {
    const GridSpec g = make_grid(512, 10e-6);
    const ScatteringLayer l1 = split_layer(100.0, 0.01, 0.1e-3);
    const ScatteringLayer l2 = split_layer(60.0, 0.02, 0.15e-3);
    ComplexField f = make_field(g, 650e-9);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.coord(i) / 50e-6;
        f.amp[i] = std::exp(-x * x);
    }
    const ComplexField ab = apply_layer(apply_layer(f, l1), l2);
    const ComplexField ba = apply_layer(apply_layer(f, l2), l1);
    for (int i = 0; i < g.n; ++i) CHECK(std::abs(ab.amp[i] - ba.amp[i]) < 1e-10);
}

TEST_CASE("diffuse halo: seed-deterministic, off by default, adds the lost power") {
    const GridSpec g = make_grid(512, 10e-6);
    ScatteringLayer layer = split_layer(std::log(2.0) / 0.01, 0.01, 0.2e-3);
    const ComplexField f = random_field(g, 4);
    const ComplexField coherent = apply_layer(f, layer);

    // halo off: a supplied noise source changes nothing
    const CounterRng rng(5, 77);
    const ComplexField still = apply_layer(f, layer, &rng);
    for (int i = 0; i < g.n; ++i) CHECK(still.amp[i] == coherent.amp[i]);

    layer.diffuse_halo = true;
    CHECK_THROWS_AS(apply_layer(f, layer), std::invalid_argument);

    const CounterRng same(5, 77);
    const ComplexField h1 = apply_layer(f, layer, &rng);
    const ComplexField h2 = apply_layer(f, layer, &same);
    for (int i = 0; i < g.n; ++i) CHECK(h1.amp[i] == h2.amp[i]);

    const CounterRng other(5, 78);
    const ComplexField h3 = apply_layer(f, layer, &other);
    double diff = 0.0;
    for (int i = 0; i < g.n; ++i) diff += std::abs(h1.amp[i] - h3.amp[i]);
    CHECK(diff > 1e-3);

    // The kernel amplitude sum is tiny here, so the coherent split loses most
    // of the scattered power; the halo restores it.
    const double p_in = total_power(f);
    const double p_coh = total_power(coherent);
    const double p_halo = total_power(h1);
    CHECK(p_coh < 0.75 * p_in);
    CHECK(p_halo > p_coh);
    CHECK(p_halo == doctest::Approx(p_in).epsilon(0.25));
}
