#include "ghostsim/config.hpp"

namespace gsim {

namespace {

// Focal lengths are chosen so that lambda*f = n*pitch^2: the shared
// free(f)+lens(f) stage then maps the source onto the detector grid sample
// for sample, and the 2f-2f relay inverts it exactly. All presets below use
// that "paper-consistent" geometry except paper-geometry-literal, which keeps
// the published lengths (and fails the first imaging condition).

// n=512,  pitch 20 um: f = 0.3150769230769231 m
// n=1024, pitch 20 um: f = 0.6301538461538462 m, 2f = 1.260307692307692 m
// n=1024, pitch 10 um: f = 0.1575384615384615 m, 2f = 0.3150769230769231 m
// n=256,  pitch 20 um: f = 0.1575384615384615 m
// n=1024, pitch 6.45 um: f = 0.06553993846153846 m

const char* kThermalG2 = R"(# Two identical arms, no object, no scattering.
# Fixed-test-point correlation at the center gives the thermal g2 peak of 2.
[grid]
n = 512
pitch = 0.02 mm
[source]
wavelength = 650 nm
aperture = 1.5 mm
statistics = circular-gaussian
[train reference]
elements = free 0.3150769230769231 m | lens 0.3150769230769231 m | free 0.3150769230769231 m
[train test]
elements = free 0.3150769230769231 m | lens 0.3150769230769231 m | free 0.3150769230769231 m
[detector reference]
kind = camera
[detector test]
kind = camera
[correlation]
mode = fixed-test-point
x_t = 0 mm
[run]
frames = 100000
seed = 101
shards = 1
)";

const char* kNoScatterDoubleSlit = R"(# Double-slit object, no scattering media, bucket reconstruction.
[grid]
n = 1024
pitch = 0.02 mm
[source]
wavelength = 650 nm
aperture = 1.8 mm
statistics = circular-gaussian
[object]
kind = double-slit
a = 0.6 mm
d = 1.8 mm
[train reference]
elements = free 0.6301538461538462 m | lens 0.6301538461538462 m | free 0.6301538461538462 m
[train test]
elements = free 0.6301538461538462 m | lens 0.6301538461538462 m | free 0.6301538461538462 m | object | free 1.260307692307692 m | lens 0.6301538461538462 m | free 1.260307692307692 m
[detector reference]
kind = camera
[detector test]
kind = bucket
[correlation]
mode = bucket
[geometry]
z = 0.6301538461538462 m
z1 = 0.6301538461538462 m
z2 = 1.260307692307692 m
z3 = 1.260307692307692 m
f = 0.6301538461538462 m
f1 = 0.6301538461538462 m
f2 = 0.6301538461538462 m
l1 = 0 mm
l2 = 0 mm
[run]
frames = 15000
seed = 7
shards = 1
)";

// The three two-media splits. The scatter elements sit at the entrance of
// each medium; the free segments carry the remaining path so the declared
// geometry satisfies all imaging conditions exactly. The inactive medium
// keeps the residual width 0.01 mm on the books.
const char* kFig2A = R"(# Split a: no medium before the object, 40 mm after it.
[grid]
n = 1024
pitch = 0.02 mm
[source]
wavelength = 650 nm
aperture = 1.8 mm
statistics = circular-gaussian
[object]
kind = double-slit
a = 0.6 mm
d = 1.8 mm
[medium 1]
mu_s = 164 /m
thickness = 0 mm
delta_x = 0.01 mm
[medium 2]
mu_s = 164 /m
thickness = 40 mm
delta_x = 1.36 mm
halo = on
halo_band = 2600 /m
[train reference]
elements = free 0.6301538461538462 m | lens 0.6301538461538462 m | free 0.6301538461538462 m
[train test]
elements = free 0.6301538461538462 m | lens 0.6301538461538462 m | free 0.6301538461538462 m | scatter 1 | object | scatter 2 | free 1.260307692307692 m | lens 0.6301538461538462 m | free 1.260307692307692 m
[detector reference]
kind = camera
[detector test]
kind = camera
[correlation]
mode = anti-diagonal
[geometry]
z = 0.6301538461538462 m
z1 = 0.6301538461538462 m
z2 = 1.220307692307692 m
z3 = 1.260307692307692 m
f = 0.6301538461538462 m
f1 = 0.6301538461538462 m
f2 = 0.6301538461538462 m
l1 = 0 mm
l2 = 40 mm
[run]
frames = 15000
seed = 21
shards = 1
)";

const char* kFig2B = R"(# Split b: 20 mm of medium on each side of the object.
[grid]
n = 1024
pitch = 0.02 mm
[source]
wavelength = 650 nm
aperture = 1.8 mm
statistics = circular-gaussian
[object]
kind = double-slit
a = 0.6 mm
d = 1.8 mm
[medium 1]
mu_s = 164 /m
thickness = 20 mm
delta_x = 0.74 mm
halo = on
halo_band = 2600 /m
[medium 2]
mu_s = 164 /m
thickness = 20 mm
delta_x = 0.74 mm
halo = on
halo_band = 2600 /m
[train reference]
elements = free 0.6301538461538462 m | lens 0.6301538461538462 m | free 0.6301538461538462 m
[train test]
elements = free 0.6301538461538462 m | lens 0.6301538461538462 m | free 0.6101538461538462 m | scatter 1 | free 20 mm | object | scatter 2 | free 1.260307692307692 m | lens 0.6301538461538462 m | free 1.260307692307692 m
[detector reference]
kind = camera
[detector test]
kind = camera
[correlation]
mode = anti-diagonal
[geometry]
z = 0.6301538461538462 m
z1 = 0.6101538461538462 m
z2 = 1.240307692307692 m
z3 = 1.260307692307692 m
f = 0.6301538461538462 m
f1 = 0.6301538461538462 m
f2 = 0.6301538461538462 m
l1 = 20 mm
l2 = 20 mm
[run]
frames = 15000
seed = 22
shards = 1
)";

const char* kFig2C = R"(# Split c: 40 mm of medium before the object, none after.
[grid]
n = 1024
pitch = 0.02 mm
[source]
wavelength = 650 nm
aperture = 1.8 mm
statistics = circular-gaussian
[object]
kind = double-slit
a = 0.6 mm
d = 1.8 mm
[medium 1]
mu_s = 164 /m
thickness = 40 mm
delta_x = 1.36 mm
halo = on
halo_band = 2600 /m
[medium 2]
mu_s = 164 /m
thickness = 0 mm
delta_x = 0.01 mm
[train reference]
elements = free 0.6301538461538462 m | lens 0.6301538461538462 m | free 0.6301538461538462 m
[train test]
elements = free 0.6301538461538462 m | lens 0.6301538461538462 m | free 0.5901538461538462 m | scatter 1 | free 40 mm | object | scatter 2 | free 1.260307692307692 m | lens 0.6301538461538462 m | free 1.260307692307692 m
[detector reference]
kind = camera
[detector test]
kind = camera
[correlation]
mode = anti-diagonal
[geometry]
z = 0.6301538461538462 m
z1 = 0.5901538461538462 m
z2 = 1.260307692307692 m
z3 = 1.260307692307692 m
f = 0.6301538461538462 m
f1 = 0.6301538461538462 m
f2 = 0.6301538461538462 m
l1 = 40 mm
l2 = 0 mm
[run]
frames = 15000
seed = 23
shards = 1
)";

// Cross-correlation peak vs pre-object medium thickness, no object, no
// post-object medium. The width grows with thickness through the broadening
// power law delta_x = k_x * L.
const char* kFig3A = R"(# 10 mm medium before the (empty) object plane.
[grid]
n = 1024
pitch = 0.01 mm
[source]
wavelength = 650 nm
aperture = 3.0 mm
statistics = circular-gaussian
[medium 1]
mu_s = 164 /m
thickness = 10 mm
k_x = 0.034
d_x = 1
halo = on
halo_band = 17600 /m
[train reference]
elements = free 0.1575384615384615 m | lens 0.1575384615384615 m | free 0.1575384615384615 m
[train test]
elements = free 0.1575384615384615 m | lens 0.1575384615384615 m | free 0.1475384615384615 m | scatter 1 | free 10 mm | free 0.3150769230769231 m | lens 0.1575384615384615 m | free 0.3150769230769231 m
[detector reference]
kind = camera
[detector test]
kind = camera
[correlation]
mode = fixed-test-point
x_t = 0 mm
[geometry]
z = 0.1575384615384615 m
z1 = 0.1475384615384615 m
z2 = 0.3150769230769231 m
z3 = 0.3150769230769231 m
f = 0.1575384615384615 m
f1 = 0.1575384615384615 m
f2 = 0.1575384615384615 m
l1 = 10 mm
l2 = 0 mm
[run]
frames = 30000
seed = 31
shards = 1
)";

const char* kFig3B = R"(# 20 mm medium before the (empty) object plane.
[grid]
n = 1024
pitch = 0.01 mm
[source]
wavelength = 650 nm
aperture = 3.0 mm
statistics = circular-gaussian
[medium 1]
mu_s = 164 /m
thickness = 20 mm
k_x = 0.034
d_x = 1
halo = on
halo_band = 17600 /m
[train reference]
elements = free 0.1575384615384615 m | lens 0.1575384615384615 m | free 0.1575384615384615 m
[train test]
elements = free 0.1575384615384615 m | lens 0.1575384615384615 m | free 0.1375384615384615 m | scatter 1 | free 20 mm | free 0.3150769230769231 m | lens 0.1575384615384615 m | free 0.3150769230769231 m
[detector reference]
kind = camera
[detector test]
kind = camera
[correlation]
mode = fixed-test-point
x_t = 0 mm
[geometry]
z = 0.1575384615384615 m
z1 = 0.1375384615384615 m
z2 = 0.3150769230769231 m
z3 = 0.3150769230769231 m
f = 0.1575384615384615 m
f1 = 0.1575384615384615 m
f2 = 0.1575384615384615 m
l1 = 20 mm
l2 = 0 mm
[run]
frames = 30000
seed = 32
shards = 1
)";

const char* kFig3C = R"(# 40 mm medium before the (empty) object plane.
[grid]
n = 1024
pitch = 0.01 mm
[source]
wavelength = 650 nm
aperture = 3.0 mm
statistics = circular-gaussian
[medium 1]
mu_s = 164 /m
thickness = 40 mm
k_x = 0.034
d_x = 1
halo = on
halo_band = 17600 /m
[train reference]
elements = free 0.1575384615384615 m | lens 0.1575384615384615 m | free 0.1575384615384615 m
[train test]
elements = free 0.1575384615384615 m | lens 0.1575384615384615 m | free 0.1175384615384615 m | scatter 1 | free 40 mm | free 0.3150769230769231 m | lens 0.1575384615384615 m | free 0.3150769230769231 m
[detector reference]
kind = camera
[detector test]
kind = camera
[correlation]
mode = fixed-test-point
x_t = 0 mm
[geometry]
z = 0.1575384615384615 m
z1 = 0.1175384615384615 m
z2 = 0.3150769230769231 m
z3 = 0.3150769230769231 m
f = 0.1575384615384615 m
f1 = 0.1575384615384615 m
f2 = 0.1575384615384615 m
l1 = 40 mm
l2 = 0 mm
[run]
frames = 30000
seed = 33
shards = 1
)";

// Small fully-ballistic-plus-blur scene with both layers active at the object
// plane; deterministic trains, so the covariance oracle applies end to end.
const char* kOracleCheck = R"(# Covariance-oracle cross-check scene.
[grid]
n = 256
pitch = 0.02 mm
[source]
wavelength = 650 nm
aperture = 1.2 mm
statistics = circular-gaussian
[object]
kind = double-slit
a = 0.3 mm
d = 0.9 mm
[medium 1]
mu_s = 164 /m
thickness = 10 mm
delta_x = 0.4 mm
[medium 2]
mu_s = 164 /m
thickness = 10 mm
delta_x = 0.3 mm
[train reference]
elements = free 0.1575384615384615 m | lens 0.1575384615384615 m | free 0.1575384615384615 m
[train test]
elements = free 0.1575384615384615 m | lens 0.1575384615384615 m | free 0.1575384615384615 m | scatter 1 | object | scatter 2 | free 0.3150769230769231 m | lens 0.1575384615384615 m | free 0.3150769230769231 m
[detector reference]
kind = camera
[detector test]
kind = camera
[correlation]
mode = outer-product
[run]
frames = 10000
seed = 41
shards = 1
)";

const char* kSpeckle40um = R"(# Aperture sized for a 40.6 um speckle grain at the detector plane.
[grid]
n = 1024
pitch = 0.00645 mm
[source]
wavelength = 650 nm
aperture = 0.9297 mm
statistics = circular-gaussian
[train reference]
elements = free 0.06553993846153846 m | lens 0.06553993846153846 m | free 0.06553993846153846 m
[train test]
elements = free 0.06553993846153846 m | lens 0.06553993846153846 m | free 0.06553993846153846 m
[detector reference]
kind = camera
[detector test]
kind = camera
[correlation]
mode = fixed-test-point
x_t = 0 mm
[run]
frames = 500
seed = 51
shards = 1
)";

// Published lengths taken at face value. The first imaging condition is not
// satisfied (residual about 2.67 /m), which the parser reports as a warning.
const char* kGeometryLiteral = R"(# Literal published geometry, demo only.
[grid]
n = 1024
pitch = 0.02 mm
[source]
wavelength = 650 nm
aperture = 1.8 mm
statistics = circular-gaussian
[object]
kind = double-slit
a = 0.6 mm
d = 1.8 mm
[train reference]
elements = free 211 mm | lens 150 mm | free 150 mm
[train test]
elements = free 300 mm | lens 400 mm | free 400 mm | object | free 390 mm | lens 250 mm | free 243.8 mm
[detector reference]
kind = camera
[detector test]
kind = camera
[correlation]
mode = anti-diagonal
[geometry]
z = 211 mm
z1 = 300 mm
z2 = 390 mm
z3 = 243.8 mm
f = 150 mm
f1 = 400 mm
f2 = 250 mm
l1 = 0 mm
l2 = 0 mm
[run]
frames = 200
seed = 61
shards = 1
)";

}  // namespace

const std::map<std::string, std::string>& embedded_presets() {
    static const std::map<std::string, std::string> presets = {
        {"thermal-g2", kThermalG2},
        {"no-scatter-doubleslit", kNoScatterDoubleSlit},
        {"paper-fig2-a", kFig2A},
        {"paper-fig2-b", kFig2B},
        {"paper-fig2-c", kFig2C},
        {"paper-fig3-a", kFig3A},
        {"paper-fig3-b", kFig3B},
        {"paper-fig3-c", kFig3C},
        {"oracle-check", kOracleCheck},
        {"speckle-40um", kSpeckle40um},
        {"paper-geometry-literal", kGeometryLiteral},
    };
    return presets;
}

const std::map<std::string, std::string>& preset_summaries() {
    static const std::map<std::string, std::string> summaries = {
        {"thermal-g2", "identical arms, fixed-test-point g2 peak of thermal speckle"},
        {"no-scatter-doubleslit", "double-slit bucket reconstruction, no scattering"},
        {"paper-fig2-a", "two-media split 0/40 mm, camera correlation imaging"},
        {"paper-fig2-b", "two-media split 20/20 mm, camera correlation imaging"},
        {"paper-fig2-c", "two-media split 40/0 mm, camera correlation imaging"},
        {"paper-fig3-a", "10 mm pre-object medium, cross-correlation peak, no object"},
        {"paper-fig3-b", "20 mm pre-object medium, cross-correlation peak, no object"},
        {"paper-fig3-c", "40 mm pre-object medium, cross-correlation peak, no object"},
        {"oracle-check", "small two-layer scene matched against the covariance oracle"},
        {"speckle-40um", "aperture calibrated for a 40.6 um detector-plane speckle"},
        {"paper-geometry-literal", "published lengths verbatim; imaging conditions fail"},
    };
    return summaries;
}

}  // namespace gsim
