#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace preflab {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

// Row-major 8-bit RGB raster.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // 3 bytes per pixel

    Image() = default;
    Image(int w, int h, Rgb fill = {});

    Rgb get(int x, int y) const;
    void set(int x, int y, Rgb c);
    std::int64_t count_nonblack() const;
    bool operator==(const Image&) const = default;
};

// 1 byte per pixel; nonzero = object.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;

    Mask() = default;
    Mask(int w, int h, std::uint8_t fill = 0);
    bool at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool on);
    std::int64_t count() const;
    bool operator==(const Mask&) const = default;
};

// h in [0,360) degrees, s and v in [0,1].
struct Hsv {
    double h = 0, s = 0, v = 0;
};

Hsv rgb_to_hsv(Rgb c);
Rgb hsv_to_rgb(Hsv c);

// Binary PPM (P6, maxval 255).
void write_ppm(const std::filesystem::path& path, const Image& img);
Image read_ppm(const std::filesystem::path& path);

// Binary PGM (P5) for masks; values are thresholded at 128 on read.
void write_pgm_mask(const std::filesystem::path& path, const Mask& mask);
Mask read_pgm_mask(const std::filesystem::path& path);

}  // namespace preflab
