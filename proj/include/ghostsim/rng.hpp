#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace gsim {

/// Seed handle for one statistical realization of the source.
struct FrameSeed {
    std::uint64_t master_seed = 0;
    std::int64_t frame_index = 0;
};

inline FrameSeed derive_frame_seed(std::uint64_t master_seed, std::int64_t frame_index) {
    if (frame_index < 0) throw std::invalid_argument("derive_frame_seed: frame_index must be >= 0");
    return FrameSeed{master_seed, frame_index};
}

/**
 * Counter-based generator (Philox4x32-10). A draw is a pure function of
 * (master seed, stream, block), so any sample of any frame can be produced
 * independently of evaluation order. Streams separate logical channels:
 * stream = frame_index << 8 | channel, with channel 0 reserved for the
 * source screen and higher channels for per-element diffuse noise.
 */
class CounterRng {
  public:
    CounterRng(std::uint64_t master_seed, std::uint64_t stream)
        : key0_(static_cast<std::uint32_t>(master_seed)),
          key1_(static_cast<std::uint32_t>(master_seed >> 32)),
          stream_(stream) {}

    static std::uint64_t stream_for(std::int64_t frame_index, std::uint32_t channel) {
        if (frame_index < 0) throw std::invalid_argument("stream_for: frame_index must be >= 0");
        if (channel > 0xff) throw std::invalid_argument("stream_for: channel must fit in 8 bits");
        return (static_cast<std::uint64_t>(frame_index) << 8) | channel;
    }

    /// Four 32-bit words for a given block counter.
    void block(std::uint64_t block_index, std::uint32_t out[4]) const {
        std::uint32_t c0 = static_cast<std::uint32_t>(block_index);
        std::uint32_t c1 = static_cast<std::uint32_t>(block_index >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
        std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ull * c0;
            const std::uint64_t p1 = 0xCD9E8D57ull * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out[0] = c0;
        out[1] = c1;
        out[2] = c2;
        out[3] = c3;
    }

    /// Two uniforms in (0, 1] from one block (53-bit mantissas, never zero).
    void uniform53_pair(std::uint64_t block_index, double& u1, double& u2) const {
        std::uint32_t w[4];
        block(block_index, w);
        const std::uint64_t a = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
        const std::uint64_t b = (static_cast<std::uint64_t>(w[2]) << 32) | w[3];
        u1 = static_cast<double>((a >> 11) + 1) * 0x1p-53;
        u2 = static_cast<double>((b >> 11) + 1) * 0x1p-53;
    }

    double uniform53(std::uint64_t block_index) const {
        double u1, u2;
        uniform53_pair(block_index, u1, u2);
        return u1;
    }

    /// Standard normal pair via Box-Muller on one block.
    void gaussian_pair(std::uint64_t block_index, double& g1, double& g2) const {
        double u1, u2;
        uniform53_pair(block_index, u1, u2);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        g1 = r * std::cos(t);
        g2 = r * std::sin(t);
    }

    /// Circular complex Gaussian with unit mean square modulus: (g1 + i g2)/sqrt(2).
    std::complex<double> circular_gaussian(std::uint64_t block_index) const {
        double g1, g2;
        gaussian_pair(block_index, g1, g2);
        return {g1 * 0.70710678118654752440, g2 * 0.70710678118654752440};
    }

  private:
    std::uint32_t key0_, key1_;
    std::uint64_t stream_;
};

}  // namespace gsim
