#include <doctest.h>

#include <cmath>
#include <vector>

#include "ghostsim/metrics.hpp"

using namespace gsim;

namespace {

std::vector<double> step_profile(const GridSpec& g, bool rising) {
    std::vector<double> p(g.samples());
    for (int i = 0; i < g.n; ++i) {
        const bool high = g.coord(i) >= 0.0;
        p[i] = (high == rising) ? 1.0 : 0.0;
    }
    return p;
}

double cumulative_gaussian(double x, double sigma) {
    return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

}  // namespace

TEST_CASE("visibility of disjoint regions") {
    const std::vector<std::uint8_t> fg{1, 1, 0, 0, 0, 0};
    const std::vector<std::uint8_t> bg{0, 0, 0, 0, 1, 1};
    CHECK(visibility({1, 1, 9, 9, 0, 0}, fg, bg) == doctest::Approx(1.0));
    CHECK(visibility({2, 2, 9, 9, 2, 2}, fg, bg) == doctest::Approx(0.0));
    CHECK(visibility({3, 3, 9, 9, 1, 1}, fg, bg) == doctest::Approx(0.5));
    // Raw value is signed; inverted contrast goes negative.
    CHECK(visibility({1, 1, 9, 9, 3, 3}, fg, bg) == doctest::Approx(-0.5));

    CHECK_THROWS_AS(visibility({1, 2}, fg, bg), std::invalid_argument);
    CHECK_THROWS_AS(visibility({1, 1, 9, 9, 0, 0}, fg, fg), std::invalid_argument);
    const std::vector<std::uint8_t> none(6, 0);
    CHECK_THROWS_AS(visibility({1, 1, 9, 9, 0, 0}, none, bg), std::invalid_argument);
}

TEST_CASE("fidelity is invariant under affine rescaling") {
    std::vector<double> truth{0, 1, 4, 2, 7, 3, 0, 5};
    std::vector<double> scaled(truth.size()), inverted(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        scaled[i] = 3.5 * truth[i] + 11.0;
        inverted[i] = -truth[i];
    }
    CHECK(fidelity(scaled, truth) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity(inverted, truth) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(fidelity({1, 2, 3}, truth), std::invalid_argument);
    CHECK_THROWS_AS(fidelity(std::vector<double>(8, 2.0), truth), std::invalid_argument);
}

TEST_CASE("speckle size scales with the grid pitch") {
    const int n = 480;
    std::vector<double> values(n);
    // Periodic intensity with 8 full fringes: autocovariance cos with a
    // half-maximum crossing 10 samples out, FWHM 20 samples.
    for (int i = 0; i < n; ++i)
        values[i] = 1.0 + std::cos(2.0 * 3.14159265358979323846 * 8.0 * i / n);

    IntensityFrame fine{make_grid(n, 10e-6), values};
    IntensityFrame coarse{make_grid(n, 20e-6), values};
    const double s_fine = speckle_size(fine);
    const double s_coarse = speckle_size(coarse);
    CHECK(s_fine == doctest::Approx(0.2e-3).epsilon(1e-6));
    CHECK(s_coarse / s_fine == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("speckle size error modes") {
    const GridSpec g = make_grid(480, 10e-6);
    CHECK_THROWS_AS(speckle_size(IntensityFrame{g, std::vector<double>(480, 2.0)}),
                    std::invalid_argument);
    // Two fringes across the frame: grains too large to count.
    std::vector<double> wide(480);
    for (int i = 0; i < 480; ++i)
        wide[i] = 1.0 + std::cos(2.0 * 3.14159265358979323846 * 2.0 * i / 480);
    CHECK_THROWS_AS(speckle_size(IntensityFrame{g, wide}), std::invalid_argument);
}

TEST_CASE("an ideal step is one pitch wide") {
    const GridSpec g = make_grid(64, 5e-6);
    CHECK(edge_width(step_profile(g, true), g, 0.0) == doctest::Approx(g.pitch).epsilon(1e-12));
    CHECK(edge_width(step_profile(g, false), g, 0.0) == doctest::Approx(g.pitch).epsilon(1e-12));
}

TEST_CASE("a cumulative-gaussian edge reports the 10-90 distance") {
    const GridSpec g = make_grid(1024, 5e-6);
    const double sigma = 100e-6;
    std::vector<double> rising(g.samples()), falling(g.samples());
    for (int i = 0; i < g.n; ++i) {
        rising[i] = cumulative_gaussian(g.coord(i), sigma);
        falling[i] = 1.0 - rising[i];
    }
    const double expect = 2.0 * 1.2815515655446004 * sigma;  // 10-90 span of a gaussian CDF
    CHECK(edge_width(rising, g, 0.0) == doctest::Approx(expect).epsilon(0.05));
    CHECK(edge_width(falling, g, 0.0) == doctest::Approx(expect).epsilon(0.05));

    // Windowed and lightly smoothed variants stay close.
    EdgeOptions opt;
    opt.half_window = 0.5e-3;
    opt.smooth_sigma = 10e-6;
    CHECK(edge_width(rising, g, 0.0, opt) == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("edge width error modes") {
    const GridSpec g = make_grid(64, 5e-6);
    CHECK_THROWS_AS(edge_width(std::vector<double>(64, 1.0), g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(edge_width(std::vector<double>(10, 1.0), g, 0.0), std::invalid_argument);
    EdgeOptions narrow;
    narrow.half_window = 2 * g.pitch;
    CHECK_THROWS_AS(edge_width(step_profile(g, true), g, 0.0, narrow), std::invalid_argument);
}

TEST_CASE("slit region masks select cores and clear flanks") {
    const GridSpec g = make_grid(1024, 10e-6);
    const double a = 0.2e-3, d = 0.6e-3;
    const auto [fg, bg] = slit_region_masks(g, a, d);
    CHECK(fg[g.index_of(0.3e-3)] == 1);
    CHECK(fg[g.index_of(-0.3e-3)] == 1);
    CHECK(fg[g.index_of(0.0)] == 0);
    CHECK(bg[g.index_of(0.7e-3)] == 1);
    CHECK(bg[g.index_of(-0.7e-3)] == 1);
    CHECK(bg[g.index_of(0.4e-3)] == 0);
    CHECK(bg[g.index_of(1.0e-3)] == 0);
    for (std::size_t i = 0; i < fg.size(); ++i) CHECK(fg[i] * bg[i] == 0);
    int nfg = 0, nbg = 0;
    for (std::size_t i = 0; i < fg.size(); ++i) {
        nfg += fg[i];
        nbg += bg[i];
    }
    CHECK(nfg > 0);
    CHECK(nbg > nfg);
}
