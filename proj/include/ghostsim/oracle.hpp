#pragma once

#include "ghostsim/grid.hpp"
#include "ghostsim/optics.hpp"
#include "ghostsim/speckle.hpp"

namespace gsim {

/**
 * Everything the closed-form predictions need: the object and layers for the
 * coefficient formulas, plus the actual source and arm trains so the
 * field-covariance composition matches the finite simulation exactly
 * (finite source aperture, grid discretization and all).
 */
struct SceneSpec {
    ObjectMask object;
    ScatteringLayer layer1;
    ScatteringLayer layer2;
    double magnification = 1.0;  // object-plane coordinate per detector coordinate
    SourceSpec source;
    OpticalTrain reference_train;
    OpticalTrain test_train;
};

void validate_scene(const SceneSpec& scene);

/**
 * Deterministic prediction of the ensemble correlation. For a circular
 * Gaussian source the cross covariance <E_r* E_t> composes from the arms'
 * impulse responses, and the Gaussian moment theorem gives
 * ΔG(x_r, x_t) = |<E_r*(x_r) E_t(x_t)>|^2 exactly. Predictions are shapes:
 * overall radiometric scale is not calibrated.
 *
 * The trains must be deterministic (no diffuse-halo layers): the halo is a
 * per-frame noise process outside the covariance composition.
 */
class OraclePrediction {
  public:
    static OraclePrediction compute(const SceneSpec& scene);

    const GridSpec& grid_r() const { return grid_r_; }
    const GridSpec& grid_t() const { return grid_t_; }

    double delta_g2_at(int i_r, int i_t) const;
    double delta_g2(double x_r, double x_t) const;

    /// Trapezoidal integral of delta_g2 over the test grid, per x_r sample.
    std::vector<double> bucket_image() const;

  private:
    GridSpec grid_r_{}, grid_t_{};
    std::vector<cplx> cov_;  // row-major, x_r rows
};

/// ΔG^(2,2) prediction for one detector-coordinate pair.
double predict_delta_g2(const SceneSpec& scene, double x_r, double x_t);

/**
 * Anti-diagonal camera image from the printed closed form:
 * |{a1 a2 + a1 b2 q2 + b1 a2 q1} t(m x_r) + b1 b2 C0(x_r)|^2, where
 * q_i = [2/(pi delta_x_i^2)]^(1/4) and C0 is the double-blur background
 * integral over the object, by trapezoidal quadrature on the object grid.
 */
std::vector<double> predict_ccd_image(const SceneSpec& scene, const GridSpec& grid_r);

/// Bucket image: trapezoidal integral of the pairwise prediction over x_t.
std::vector<double> predict_bucket_image(const SceneSpec& scene);

}  // namespace gsim
