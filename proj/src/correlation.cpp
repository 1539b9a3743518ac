#include "ghostsim/correlation.hpp"

#include <stdexcept>

namespace gsim {

namespace {

std::size_t prod_size(AccumulatorMode mode, const GridSpec& gr, const GridSpec& gt) {
    switch (mode) {
        case AccumulatorMode::OuterProduct:
            return gr.samples() * gt.samples();
        case AccumulatorMode::AntiDiagonal:
        case AccumulatorMode::FixedTestPoint:
        case AccumulatorMode::Bucket:
            return gr.samples();
    }
    return 0;
}

bool has_test_vector(AccumulatorMode mode) {
    return mode == AccumulatorMode::OuterProduct || mode == AccumulatorMode::AntiDiagonal;
}

}  // namespace

CorrelationAccumulator CorrelationAccumulator::make(AccumulatorMode mode, const GridSpec& grid_r,
                                                    const GridSpec& grid_t, double x_t,
                                                    std::size_t memory_budget) {
    CorrelationAccumulator acc;
    acc.mode_ = mode;
    acc.grid_r_ = grid_r;
    acc.grid_t_ = grid_t;
    if (mode == AccumulatorMode::FixedTestPoint) {
        if (std::abs(x_t) > grid_t.extent() / 2)
            throw std::invalid_argument("CorrelationAccumulator: x_t outside the test grid");
        acc.xt_index_ = grid_t.index_of(x_t);
    }
    if (mode == AccumulatorMode::AntiDiagonal && !(grid_r == grid_t))
        throw std::invalid_argument(
            "CorrelationAccumulator: anti-diagonal mode needs matching grids");
    if (mode == AccumulatorMode::OuterProduct) {
        const std::size_t bytes = prod_size(mode, grid_r, grid_t) * sizeof(double) *
                                  static_cast<std::size_t>(max_levels + 2);
        if (bytes > memory_budget)
            throw std::invalid_argument(
                "CorrelationAccumulator: outer-product store exceeds the memory budget");
    }
    return acc;
}

void CorrelationAccumulator::add_into(Partial& dst, const Partial& src) {
    if (dst.count == 0) {
        dst = src;
        return;
    }
    for (std::size_t i = 0; i < dst.sum_r.size(); ++i) dst.sum_r[i] += src.sum_r[i];
    for (std::size_t i = 0; i < dst.sum_t.size(); ++i) dst.sum_t[i] += src.sum_t[i];
    for (std::size_t i = 0; i < dst.sum_prod.size(); ++i) dst.sum_prod[i] += src.sum_prod[i];
    dst.sum_t_scalar += src.sum_t_scalar;
    dst.count += src.count;
}

void CorrelationAccumulator::push_frame() {
    // Binary-counter carry: each occupied level holds the sum of 2^k frames.
    for (int k = 0;; ++k) {
        if (k == max_levels) {
            if (!overflow_) overflow_.emplace();
            add_into(*overflow_, scratch_);
            return;
        }
        if (k == static_cast<int>(levels_.size())) {
            levels_.push_back(std::move(scratch_));
            occupied_.push_back(1);
            scratch_ = Partial{};
            return;
        }
        if (!occupied_[k]) {
            std::swap(levels_[k], scratch_);
            occupied_[k] = 1;
            return;
        }
        add_into(scratch_, levels_[k]);
        occupied_[k] = 0;
    }
}

void CorrelationAccumulator::update(const IntensityFrame& I_r, const IntensityFrame& I_t) {
    if (mode_ == AccumulatorMode::Bucket)
        throw std::invalid_argument("update: bucket mode takes a scalar observation");
    if (!(I_r.grid == grid_r_) || !(I_t.grid == grid_t_))
        throw std::invalid_argument("update: frame grid does not match the accumulator");

    const std::size_t nr = grid_r_.samples(), nt = grid_t_.samples();
    scratch_.sum_r = I_r.values;
    scratch_.count = 1;
    scratch_.sum_t_scalar = 0.0;
    switch (mode_) {
        case AccumulatorMode::OuterProduct: {
            scratch_.sum_t = I_t.values;
            scratch_.sum_prod.resize(nr * nt);
            for (std::size_t i = 0; i < nr; ++i)
                for (std::size_t j = 0; j < nt; ++j)
                    scratch_.sum_prod[i * nt + j] = I_r.values[i] * I_t.values[j];
            break;
        }
        case AccumulatorMode::AntiDiagonal: {
            scratch_.sum_t = I_t.values;
            scratch_.sum_prod.resize(nr);
            const int n = grid_r_.n;
            for (int i = 0; i < n; ++i)
                scratch_.sum_prod[i] = I_r.values[i] * I_t.values[detail::flip_index(i, n)];
            break;
        }
        case AccumulatorMode::FixedTestPoint: {
            scratch_.sum_t.clear();
            scratch_.sum_t_scalar = I_t.values[xt_index_];
            scratch_.sum_prod.resize(nr);
            for (std::size_t i = 0; i < nr; ++i)
                scratch_.sum_prod[i] = I_r.values[i] * scratch_.sum_t_scalar;
            break;
        }
        case AccumulatorMode::Bucket:
            break;
    }
    ++total_count_;
    push_frame();
}

void CorrelationAccumulator::update(const IntensityFrame& I_r, double t_obs) {
    if (mode_ != AccumulatorMode::Bucket && mode_ != AccumulatorMode::FixedTestPoint)
        throw std::invalid_argument(
            "update: scalar observations are for bucket or fixed-test-point modes");
    if (!(I_r.grid == grid_r_))
        throw std::invalid_argument("update: frame grid does not match the accumulator");
    const std::size_t nr = grid_r_.samples();
    scratch_.sum_r = I_r.values;
    scratch_.sum_t.clear();
    scratch_.sum_t_scalar = t_obs;
    scratch_.sum_prod.resize(nr);
    for (std::size_t i = 0; i < nr; ++i) scratch_.sum_prod[i] = I_r.values[i] * t_obs;
    scratch_.count = 1;
    ++total_count_;
    push_frame();
}

CorrelationAccumulator::Partial CorrelationAccumulator::collapse() const {
    Partial total;
    total.sum_r.assign(grid_r_.samples(), 0.0);
    if (has_test_vector(mode_)) total.sum_t.assign(grid_t_.samples(), 0.0);
    total.sum_prod.assign(prod_size(mode_, grid_r_, grid_t_), 0.0);
    total.count = 0;
    for (std::size_t k = 0; k < levels_.size(); ++k)
        if (occupied_[k]) add_into(total, levels_[k]);
    if (overflow_) add_into(total, *overflow_);
    return total;
}

CorrelationAccumulator CorrelationAccumulator::merge(const CorrelationAccumulator& a,
                                                     const CorrelationAccumulator& b) {
    if (a.mode_ != b.mode_ || !(a.grid_r_ == b.grid_r_) || !(a.grid_t_ == b.grid_t_) ||
        a.xt_index_ != b.xt_index_)
        throw std::invalid_argument("merge: accumulator mode or grids differ");
    CorrelationAccumulator out;
    out.mode_ = a.mode_;
    out.grid_r_ = a.grid_r_;
    out.grid_t_ = a.grid_t_;
    out.xt_index_ = a.xt_index_;
    out.total_count_ = a.total_count_ + b.total_count_;
    out.overflow_ = a.collapse();
    add_into(*out.overflow_, b.collapse());
    return out;
}

DeltaG2Map finalize_delta_g2(const CorrelationAccumulator& acc) {
    if (acc.total_count_ < 2)
        throw std::invalid_argument("finalize_delta_g2: at least 2 frames required");
    const auto total = acc.collapse();
    const double inv_n = 1.0 / static_cast<double>(total.count);
    const std::size_t nr = acc.grid_r_.samples();

    DeltaG2Map map{acc.mode_, acc.grid_r_, acc.grid_t_, {}};
    map.values.resize(total.sum_prod.size());
    switch (acc.mode_) {
        case AccumulatorMode::OuterProduct: {
            const std::size_t nt = acc.grid_t_.samples();
            for (std::size_t i = 0; i < nr; ++i)
                for (std::size_t j = 0; j < nt; ++j)
                    map.values[i * nt + j] = total.sum_prod[i * nt + j] * inv_n -
                                             (total.sum_r[i] * inv_n) * (total.sum_t[j] * inv_n);
            break;
        }
        case AccumulatorMode::AntiDiagonal: {
            const int n = acc.grid_r_.n;
            for (int i = 0; i < n; ++i)
                map.values[i] = total.sum_prod[i] * inv_n -
                                (total.sum_r[i] * inv_n) *
                                    (total.sum_t[detail::flip_index(i, n)] * inv_n);
            break;
        }
        case AccumulatorMode::FixedTestPoint:
        case AccumulatorMode::Bucket: {
            const double mt = total.sum_t_scalar * inv_n;
            for (std::size_t i = 0; i < nr; ++i)
                map.values[i] = total.sum_prod[i] * inv_n - (total.sum_r[i] * inv_n) * mt;
            break;
        }
    }
    return map;
}

G2Map finalize_g2(const CorrelationAccumulator& acc) {
    const DeltaG2Map dg = finalize_delta_g2(acc);
    const auto total = acc.collapse();
    const double inv_n = 1.0 / static_cast<double>(total.count);
    const std::size_t nr = acc.grid_r_.samples();

    G2Map g2{acc.mode_, acc.grid_r_, {}, {}};
    g2.values.assign(dg.values.size(), 0.0);
    g2.valid.assign(dg.values.size(), 0);
    std::size_t live = 0;
    auto emit = [&](std::size_t idx, double mr, double mt) {
        if (mr > 0.0 && mt > 0.0) {
            g2.values[idx] = 1.0 + dg.values[idx] / (mr * mt);
            g2.valid[idx] = 1;
            ++live;
        }
    };
    switch (acc.mode_) {
        case AccumulatorMode::OuterProduct: {
            const std::size_t nt = acc.grid_t_.samples();
            for (std::size_t i = 0; i < nr; ++i)
                for (std::size_t j = 0; j < nt; ++j)
                    emit(i * nt + j, total.sum_r[i] * inv_n, total.sum_t[j] * inv_n);
            break;
        }
        case AccumulatorMode::AntiDiagonal: {
            const int n = acc.grid_r_.n;
            for (int i = 0; i < n; ++i)
                emit(i, total.sum_r[i] * inv_n,
                     total.sum_t[detail::flip_index(i, n)] * inv_n);
            break;
        }
        case AccumulatorMode::FixedTestPoint:
        case AccumulatorMode::Bucket: {
            const double mt = total.sum_t_scalar * inv_n;
            for (std::size_t i = 0; i < nr; ++i) emit(i, total.sum_r[i] * inv_n, mt);
            break;
        }
    }
    if (live == 0) throw std::invalid_argument("finalize_g2: all means are zero");
    return g2;
}

std::vector<double> reconstruct_bucket(const CorrelationAccumulator& acc) {
    if (acc.mode() != AccumulatorMode::Bucket)
        throw std::invalid_argument("reconstruct_bucket: accumulator is not in bucket mode");
    return finalize_delta_g2(acc).values;
}

std::vector<double> reconstruct_anti_diagonal(const CorrelationAccumulator& acc) {
    if (acc.mode() != AccumulatorMode::AntiDiagonal)
        throw std::invalid_argument(
            "reconstruct_anti_diagonal: accumulator is not in anti-diagonal mode");
    return finalize_delta_g2(acc).values;
}

}  // namespace gsim
