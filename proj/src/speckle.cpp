#include "ghostsim/speckle.hpp"

#include <cmath>
#include <stdexcept>

namespace gsim {

ComplexField generate_frame(const SourceSpec& src, const FrameSeed& seed, double wavelength) {
    if (src.grid.dim != 1) throw std::invalid_argument("generate_frame: 1-D sources only");
    if (!(src.aperture_width > 0.0))
        throw std::invalid_argument("generate_frame: aperture_width must be > 0");
    if (!(src.mean_intensity > 0.0))
        throw std::invalid_argument("generate_frame: mean_intensity must be > 0");
    if (seed.frame_index < 0)
        throw std::invalid_argument("generate_frame: frame_index must be >= 0");

    ComplexField f = make_field(src.grid, wavelength, "source");
    const CounterRng rng(seed.master_seed, CounterRng::stream_for(seed.frame_index, 0));
    const double amp0 = std::sqrt(src.mean_intensity);
    const double half = 0.5 * src.aperture_width;
    const double two_pi = 6.283185307179586476925286766559;

    for (int i = 0; i < src.grid.n; ++i) {
        if (std::abs(src.grid.coord(i)) > half) continue;
        if (src.statistics == SourceStatistics::CircularGaussian) {
            f.amp[i] = amp0 * rng.circular_gaussian(static_cast<std::uint64_t>(i));
        } else {
            const double u = rng.uniform53(static_cast<std::uint64_t>(i));
            f.amp[i] = amp0 * std::polar(1.0, two_pi * u);
        }
    }
    return f;
}

}  // namespace gsim
