#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gsim {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major
};

/// Read an 8-bit grayscale image: portable graymap (P2/P5) or PNG. PNG inputs
/// with color or 16-bit depth are converted to 8-bit gray.
GrayImage read_gray_image(const std::string& path);

/// Write a 16-bit grayscale PNG.
void write_png16(const std::string& path, int width, int height,
                 const std::vector<std::uint16_t>& pixels);

/// Min-max scale samples to the full 16-bit range. Returns the (offset, step)
/// used, with value = offset + pixel*step; constant input maps to zeros with
/// step 0.
std::pair<double, double> quantize16(const std::vector<double>& values,
                                     std::vector<std::uint16_t>& out);

}  // namespace gsim
