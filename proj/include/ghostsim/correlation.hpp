#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ghostsim/grid.hpp"

namespace gsim {

enum class AccumulatorMode { OuterProduct, AntiDiagonal, FixedTestPoint, Bucket };

/// Finalized covariance ΔG(x_r, x_t) restricted to the mode's index set:
/// the full matrix for outer-product (row-major, x_r rows), otherwise a
/// profile over x_r.
struct DeltaG2Map {
    AccumulatorMode mode;
    GridSpec grid_r;
    GridSpec grid_t;
    std::vector<double> values;
};

/// Normalized correlation g2 = 1 + ΔG / (<I_r><I_t>) on the same index set.
/// Samples where either mean vanishes are flagged invalid and set to 0.
struct G2Map {
    AccumulatorMode mode;
    GridSpec grid_r;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;
};

/**
 * Streaming second-order correlator over frame pairs (I_r, I_t). Sums are
 * kept in double precision with pairwise (binary-counter) accumulation so
 * rounding stays bounded over 1e5-frame runs; a fixed carry rule makes every
 * run bit-identical for a given frame order. Covariance normalization is 1/N.
 */
class CorrelationAccumulator {
  public:
    /// grid_t is the test-side grid (ignored for bucket mode). x_t selects the
    /// fixed test point. Outer-product mode rejects index sets whose product
    /// store would exceed memory_budget bytes.
    static CorrelationAccumulator make(AccumulatorMode mode, const GridSpec& grid_r,
                                       const GridSpec& grid_t, double x_t = 0.0,
                                       std::size_t memory_budget = default_memory_budget);

    /// Frame update for outer-product, anti-diagonal, and fixed-test-point modes.
    void update(const IntensityFrame& I_r, const IntensityFrame& I_t);
    /// Scalar frame update: the integrated bucket value, or a point detector's
    /// reading at the fixed test point.
    void update(const IntensityFrame& I_r, double t_obs);

    std::int64_t frames() const { return total_count_; }
    AccumulatorMode mode() const { return mode_; }
    const GridSpec& grid_r() const { return grid_r_; }

    /// Component-wise sum of both accumulators' statistics.
    static CorrelationAccumulator merge(const CorrelationAccumulator& a,
                                        const CorrelationAccumulator& b);

    friend DeltaG2Map finalize_delta_g2(const CorrelationAccumulator& acc);
    friend G2Map finalize_g2(const CorrelationAccumulator& acc);

    static constexpr std::size_t default_memory_budget = std::size_t{512} << 20;

  private:
    struct Partial {
        std::vector<double> sum_r;
        std::vector<double> sum_t;     // empty for fixed/bucket modes
        std::vector<double> sum_prod;
        double sum_t_scalar = 0.0;     // I_t(x_t) or bucket value sums
        std::int64_t count = 0;
    };

    CorrelationAccumulator() = default;
    void push_frame();
    Partial collapse() const;
    static void add_into(Partial& dst, const Partial& src);

    AccumulatorMode mode_ = AccumulatorMode::Bucket;
    GridSpec grid_r_{}, grid_t_{};
    int xt_index_ = 0;
    std::int64_t total_count_ = 0;
    Partial scratch_;
    std::vector<Partial> levels_;
    std::vector<std::uint8_t> occupied_;
    std::optional<Partial> overflow_;  // carries beyond the top level, and merge results

    static constexpr int max_levels = 12;
};

DeltaG2Map finalize_delta_g2(const CorrelationAccumulator& acc);
G2Map finalize_g2(const CorrelationAccumulator& acc);

/// Bucket-mode image over x_r: <I_r B> - <I_r><B>.
std::vector<double> reconstruct_bucket(const CorrelationAccumulator& acc);
/// Anti-diagonal camera image over x_r: <I_r(x) I_t(-x)> - <I_r(x)><I_t(-x)>.
std::vector<double> reconstruct_anti_diagonal(const CorrelationAccumulator& acc);

}  // namespace gsim
