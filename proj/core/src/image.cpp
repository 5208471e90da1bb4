#include "preflab/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "preflab/errors.hpp"

namespace preflab {

Image::Image(int w, int h, Rgb fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3) {
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
        pixels[i] = fill.r;
        pixels[i + 1] = fill.g;
        pixels[i + 2] = fill.b;
    }
}

Rgb Image::get(int x, int y) const {
    std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
    std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    pixels[i] = c.r;
    pixels[i + 1] = c.g;
    pixels[i + 2] = c.b;
}

std::int64_t Image::count_nonblack() const {
    std::int64_t n = 0;
    for (std::size_t i = 0; i < pixels.size(); i += 3)
        if (pixels[i] | pixels[i + 1] | pixels[i + 2]) ++n;
    return n;
}

Mask::Mask(int w, int h, std::uint8_t fill)
    : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

void Mask::set(int x, int y, bool on) {
    values[static_cast<std::size_t>(y) * width + x] = on ? 255 : 0;
}

std::int64_t Mask::count() const {
    return std::count_if(values.begin(), values.end(),
                         [](std::uint8_t v) { return v != 0; });
}

Hsv rgb_to_hsv(Rgb c) {
    double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
    double mx = std::max({r, g, b}), mn = std::min({r, g, b});
    double d = mx - mn;
    Hsv out;
    out.v = mx;
    out.s = mx == 0.0 ? 0.0 : d / mx;
    if (d == 0.0) {
        out.h = 0.0;
    } else if (mx == r) {
        out.h = 60.0 * std::fmod((g - b) / d, 6.0);
    } else if (mx == g) {
        out.h = 60.0 * ((b - r) / d + 2.0);
    } else {
        out.h = 60.0 * ((r - g) / d + 4.0);
    }
    if (out.h < 0) out.h += 360.0;
    return out;
}

Rgb hsv_to_rgb(Hsv c) {
    double h = std::fmod(c.h, 360.0);
    if (h < 0) h += 360.0;
    double chroma = c.v * c.s;
    double hp = h / 60.0;
    double x = chroma * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = chroma; g = x; }
    else if (hp < 2) { r = x; g = chroma; }
    else if (hp < 3) { g = chroma; b = x; }
    else if (hp < 4) { g = x; b = chroma; }
    else if (hp < 5) { r = x; b = chroma; }
    else { r = chroma; b = x; }
    double m = c.v - chroma;
    auto to_byte = [](double v) {
        return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    };
    return {to_byte(r + m), to_byte(g + m), to_byte(b + m)};
}

namespace {

int read_pnm_int(std::istream& is) {
    // Skips whitespace and '#' comments per the PNM grammar.
    int ch = is.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = is.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = is.get();
    }
    if (ch == EOF || !std::isdigit(ch))
        throw FormatError("PNM header: expected integer at byte " +
                          std::to_string(static_cast<long long>(is.tellg()) - 1));
    int value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        ch = is.get();
    }
    return value;
}

void check_header(std::istream& is, const char* magic, const std::string& path) {
    char m[2];
    is.read(m, 2);
    if (!is || m[0] != magic[0] || m[1] != magic[1])
        throw FormatError(std::string("expected ") + magic + " magic at byte 0: " + path);
}

}  // namespace

void write_ppm(const std::filesystem::path& path, const Image& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for write: " + path.string());
    os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.pixels.data()),
             static_cast<std::streamsize>(img.pixels.size()));
    if (!os) throw IoError("write failed: " + path.string());
}

Image read_ppm(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path.string());
    check_header(is, "P6", path.string());
    int w = read_pnm_int(is), h = read_pnm_int(is), maxval = read_pnm_int(is);
    if (maxval != 255)
        throw FormatError("PPM maxval must be 255, got " + std::to_string(maxval) +
                          ": " + path.string());
    Image img(w, h);
    is.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (!is)
        throw FormatError("PPM payload truncated at byte " +
                          std::to_string(static_cast<long long>(is.gcount())) + ": " +
                          path.string());
    return img;
}

void write_pgm_mask(const std::filesystem::path& path, const Mask& mask) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for write: " + path.string());
    os << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(mask.values.data()),
             static_cast<std::streamsize>(mask.values.size()));
    if (!os) throw IoError("write failed: " + path.string());
}

Mask read_pgm_mask(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path.string());
    check_header(is, "P5", path.string());
    int w = read_pnm_int(is), h = read_pnm_int(is), maxval = read_pnm_int(is);
    if (maxval != 1 && maxval != 255)
        throw FormatError("mask PGM maxval must be 1 or 255: " + path.string());
    Mask mask(w, h);
    is.read(reinterpret_cast<char*>(mask.values.data()),
            static_cast<std::streamsize>(mask.values.size()));
    if (!is) throw FormatError("mask PGM payload truncated: " + path.string());
    std::uint8_t threshold = maxval == 1 ? 1 : 128;
    for (auto& v : mask.values) v = v >= threshold ? 255 : 0;
    return mask;
}

}  // namespace preflab
