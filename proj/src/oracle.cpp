#include "ghostsim/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace gsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_deterministic(const OpticalTrain& train, const char* which) {
    for (const auto& el : train.elements)
        if (const auto* sc = std::get_if<ScatterElement>(&el))
            if (sc->layer.diffuse_halo)
                throw std::invalid_argument(std::string("oracle: ") + which +
                                            " train has a diffuse-halo layer; the covariance "
                                            "composition covers the deterministic model only");
}

/// Continuous Gaussian point-scattering amplitude (no discrete renormalization).
double psf_value(double delta_x, double u) {
    const double peak = std::pow(2.0 / (kPi * delta_x * delta_x), 0.25);
    const double r = u / delta_x;
    return peak * std::exp(-r * r);
}

double transmission_at(const ObjectMask& object, double x) {
    if (std::abs(x) > object.grid.extent() / 2) return 0.0;
    return std::abs(object.transmission[object.grid.index_of(x)]);
}

}  // namespace

void validate_scene(const SceneSpec& scene) {
    validate_mask(scene.object);
    validate_layer(scene.layer1);
    validate_layer(scene.layer2);
    if (!(scene.magnification > 0.0))
        throw std::invalid_argument("SceneSpec: magnification must be > 0");
    validate_train(scene.reference_train);
    validate_train(scene.test_train);
}

OraclePrediction OraclePrediction::compute(const SceneSpec& scene) {
    validate_scene(scene);
    if (scene.source.statistics != SourceStatistics::CircularGaussian)
        throw std::invalid_argument(
            "oracle: covariance composition requires circular Gaussian source statistics");
    require_deterministic(scene.reference_train, "reference");
    require_deterministic(scene.test_train, "test");

    const GridSpec& sg = scene.source.grid;
    const double wavelength = scene.reference_train.wavelength;

    OraclePrediction out;
    ComplexField impulse = make_field(sg, wavelength, "impulse");
    bool first = true;
    for (int s = 0; s < sg.n; ++s) {
        if (std::abs(sg.coord(s)) > scene.source.aperture_width / 2) continue;
        impulse.amp.assign(sg.samples(), cplx{0.0, 0.0});
        impulse.amp[s] = 1.0;
        const ComplexField hr = run_arm(impulse, scene.reference_train);
        const ComplexField ht = run_arm(impulse, scene.test_train);
        if (first) {
            out.grid_r_ = hr.grid;
            out.grid_t_ = ht.grid;
            out.cov_.assign(out.grid_r_.samples() * out.grid_t_.samples(), cplx{0.0, 0.0});
            first = false;
        }
        const std::size_t nt = out.grid_t_.samples();
        for (std::size_t i = 0; i < out.grid_r_.samples(); ++i) {
            const cplx a = std::conj(hr.amp[i]) * scene.source.mean_intensity;
            for (std::size_t j = 0; j < nt; ++j) out.cov_[i * nt + j] += a * ht.amp[j];
        }
    }
    if (first) throw std::invalid_argument("oracle: source aperture covers no grid samples");
    return out;
}

double OraclePrediction::delta_g2_at(int i_r, int i_t) const {
    const std::size_t nt = grid_t_.samples();
    return std::norm(cov_[static_cast<std::size_t>(i_r) * nt + i_t]);
}

double OraclePrediction::delta_g2(double x_r, double x_t) const {
    return delta_g2_at(grid_r_.index_of(x_r), grid_t_.index_of(x_t));
}

std::vector<double> OraclePrediction::bucket_image() const {
    const std::size_t nr = grid_r_.samples(), nt = grid_t_.samples();
    std::vector<double> img(nr, 0.0);
    for (std::size_t i = 0; i < nr; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < nt; ++j) {
            const double v = std::norm(cov_[i * nt + j]);
            s += (j == 0 || j + 1 == nt) ? 0.5 * v : v;
        }
        img[i] = s * grid_t_.pitch;
    }
    return img;
}

double predict_delta_g2(const SceneSpec& scene, double x_r, double x_t) {
    return OraclePrediction::compute(scene).delta_g2(x_r, x_t);
}

std::vector<double> predict_ccd_image(const SceneSpec& scene, const GridSpec& grid_r) {
    validate_scene(scene);
    const double a1 = std::abs(scene.layer1.alpha), b1 = std::abs(scene.layer1.beta);
    const double a2 = std::abs(scene.layer2.alpha), b2 = std::abs(scene.layer2.beta);
    const double m = scene.magnification;

    double coeff = a1 * a2;
    if (b2 > 0.0) coeff += a1 * b2 * std::pow(2.0 / (kPi * scene.layer2.delta_x * scene.layer2.delta_x), 0.25);
    if (b1 > 0.0) coeff += b1 * a2 * std::pow(2.0 / (kPi * scene.layer1.delta_x * scene.layer1.delta_x), 0.25);

    const GridSpec& og = scene.object.grid;
    std::vector<double> img(grid_r.samples());
    for (int i = 0; i < grid_r.n; ++i) {
        const double xo = m * grid_r.coord(i);
        cplx v = coeff * transmission_at(scene.object, xo);
        if (b1 > 0.0 && b2 > 0.0) {
            // Background term: object seen through both blurs, trapezoid over
            // the object grid.
            double c0 = 0.0;
            for (int j = 0; j < og.n; ++j) {
                const double xp = og.coord(j);
                const double term = std::abs(scene.object.transmission[j]) *
                                    psf_value(scene.layer1.delta_x, xp - xo) *
                                    psf_value(scene.layer2.delta_x, xo - xp);
                c0 += (j == 0 || j + 1 == og.n) ? 0.5 * term : term;
            }
            v += b1 * b2 * c0 * og.pitch;
        }
        img[i] = std::norm(v);
    }
    return img;
}

std::vector<double> predict_bucket_image(const SceneSpec& scene) {
    return OraclePrediction::compute(scene).bucket_image();
}

}  // namespace gsim
