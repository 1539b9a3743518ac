#include "ghostsim/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace gsim {

namespace {

GrayImage read_pgm(std::ifstream& in, const std::string& path) {
    std::string magic;
    in >> magic;
    auto next_token = [&]() {
        // Skip whitespace and '#' comment lines between header tokens.
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw std::runtime_error("read_gray_image: truncated PGM header in " + path);
    };
    const int width = std::stoi(next_token());
    const int height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (width <= 0 || height <= 0)
        throw std::runtime_error("read_gray_image: bad PGM dimensions in " + path);
    if (maxval <= 0 || maxval > 255)
        throw std::runtime_error("read_gray_image: only 8-bit PGM supported: " + path);

    GrayImage img{width, height, {}};
    img.pixels.resize(static_cast<std::size_t>(width) * height);
    if (magic == "P5") {
        in.ignore(1);  // single whitespace after maxval
        in.read(reinterpret_cast<char*>(img.pixels.data()),
                static_cast<std::streamsize>(img.pixels.size()));
        if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
            throw std::runtime_error("read_gray_image: truncated PGM data in " + path);
    } else {
        for (auto& p : img.pixels) {
            int v;
            if (!(in >> v)) throw std::runtime_error("read_gray_image: truncated PGM data in " + path);
            if (v < 0 || v > maxval)
                throw std::runtime_error("read_gray_image: PGM value out of range in " + path);
            p = static_cast<std::uint8_t>(v);
        }
    }
    if (maxval != 255)
        for (auto& p : img.pixels)
            p = static_cast<std::uint8_t>(std::lround(p * 255.0 / maxval));
    return img;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

GrayImage read_png(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("read_gray_image: cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("read_gray_image: libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("read_gray_image: libpng init failed");
    }
    GrayImage img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("read_gray_image: PNG decode failed for " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    const int color_type = png_get_color_type(png, info);
    if (color_type & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray(png, 1, -1.0, -1.0);
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    rows.resize(static_cast<std::size_t>(img.height));
    for (int y = 0; y < img.height; ++y)
        rows[y] = img.pixels.data() + static_cast<std::size_t>(y) * img.width;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

}  // namespace

GrayImage read_gray_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_gray_image: cannot open " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    in.seekg(0);
    if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) return read_pgm(in, path);
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') {
        in.close();
        return read_png(path);
    }
    throw std::runtime_error("read_gray_image: unsupported format (want PGM or PNG): " + path);
}

void write_png16(const std::string& path, int width, int height,
                 const std::vector<std::uint16_t>& pixels) {
    if (width <= 0 || height <= 0 ||
        pixels.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("write_png16: dimensions do not match pixel count");
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("write_png16: cannot open " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("write_png16: libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("write_png16: libpng init failed");
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("write_png16: PNG encode failed for " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 16,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if constexpr (std::endian::native == std::endian::little) png_set_swap(png);
    auto* data = const_cast<png_bytep>(reinterpret_cast<const png_byte*>(pixels.data()));
    for (int y = 0; y < height; ++y)
        rows[y] = data + static_cast<std::size_t>(y) * width * 2;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::pair<double, double> quantize16(const std::vector<double>& values,
                                     std::vector<std::uint16_t>& out) {
    out.assign(values.size(), 0);
    if (values.empty()) return {0.0, 0.0};
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) return {lo, 0.0};
    const double step = (hi - lo) / 65535.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = static_cast<std::uint16_t>(std::lround((values[i] - lo) / step));
    return {lo, step};
}

}  // namespace gsim
