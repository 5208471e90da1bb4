#include "preflab/digits.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "preflab/errors.hpp"
#include "preflab/rng.hpp"

namespace preflab {

namespace {

struct Pt {
    double x, y;
};
using Stroke = std::vector<Pt>;

// Glyphs as polylines in the unit square (y grows downward).
std::vector<Stroke> digit_strokes(int digit) {
    auto ellipse = [](double cx, double cy, double rx, double ry) {
        Stroke s;
        for (int i = 0; i <= 16; ++i) {
            double t = 2.0 * M_PI * i / 16;
            s.push_back({cx + rx * std::sin(t), cy - ry * std::cos(t)});
        }
        return s;
    };
    switch (digit) {
        case 0: return {ellipse(0.5, 0.5, 0.26, 0.4)};
        case 1: return {{{0.35, 0.28}, {0.55, 0.1}, {0.55, 0.9}}};
        case 2:
            return {{{0.27, 0.3}, {0.32, 0.15}, {0.5, 0.1}, {0.68, 0.15},
                     {0.73, 0.3}, {0.68, 0.45}, {0.32, 0.75}, {0.27, 0.9},
                     {0.73, 0.9}}};
        case 3:
            return {{{0.28, 0.2}, {0.42, 0.1}, {0.64, 0.15}, {0.7, 0.3},
                     {0.6, 0.44}, {0.46, 0.5}, {0.6, 0.56}, {0.71, 0.7},
                     {0.64, 0.85}, {0.42, 0.9}, {0.28, 0.8}}};
        case 4:
            return {{{0.6, 0.1}, {0.27, 0.62}, {0.75, 0.62}},
                    {{0.6, 0.35}, {0.6, 0.9}}};
        case 5:
            return {{{0.7, 0.1}, {0.32, 0.1}, {0.29, 0.45}, {0.55, 0.42},
                     {0.71, 0.55}, {0.71, 0.74}, {0.55, 0.89}, {0.3, 0.85}}};
        case 6:
            return {{{0.64, 0.12}, {0.43, 0.2}, {0.31, 0.45}, {0.29, 0.7},
                     {0.41, 0.88}, {0.59, 0.88}, {0.7, 0.72}, {0.62, 0.56},
                     {0.43, 0.53}, {0.31, 0.62}}};
        case 7: return {{{0.27, 0.1}, {0.73, 0.1}, {0.45, 0.9}}};
        case 8:
            return {ellipse(0.5, 0.3, 0.19, 0.2), ellipse(0.5, 0.69, 0.23, 0.21)};
        case 9:
            return {{{0.37, 0.88}, {0.57, 0.8}, {0.69, 0.55}, {0.71, 0.3},
                     {0.59, 0.12}, {0.41, 0.12}, {0.3, 0.28}, {0.38, 0.44},
                     {0.57, 0.47}, {0.69, 0.38}}};
        default: throw InputError("digit must be 0-9");
    }
}

double segment_distance(double px, double py, Pt a, Pt b) {
    double dx = b.x - a.x, dy = b.y - a.y;
    double len2 = dx * dx + dy * dy;
    double t = len2 == 0 ? 0
                         : std::clamp(((px - a.x) * dx + (py - a.y) * dy) / len2,
                                      0.0, 1.0);
    double ex = a.x + t * dx - px, ey = a.y + t * dy - py;
    return std::sqrt(ex * ex + ey * ey);
}

}  // namespace

IdxDataset synth_digit_corpus(int per_class, std::uint64_t seed, int side) {
    if (per_class <= 0 || side < 16)
        throw InputError("synth_digit_corpus: per_class >= 1, side >= 16");
    IdxDataset out;
    out.rows = side;
    out.cols = side;
    const double margin = side * 0.14;
    const double span = side - 2 * margin;
    for (int digit = 0; digit < 10; ++digit) {
        auto base = digit_strokes(digit);
        for (int i = 0; i < per_class; ++i) {
            Rng rng(derive_seed(seed, 0xD161, digit, i));
            // Severity in [0,1] scales every distortion, so a class has a
            // smooth spectrum from prototypical to heavily deformed.
            double sv = std::sqrt(rng.uniform());
            double rot = (rng.uniform() * 2 - 1) * 1.00 * sv;
            double shear = (rng.uniform() * 2 - 1) * 0.70 * sv;
            double sx = 1.0 + (rng.uniform() * 2 - 1) * 0.35 * sv;
            double sy = 1.0 + (rng.uniform() * 2 - 1) * 0.35 * sv;
            double tx = (rng.uniform() * 2 - 1) * 0.18 * sv;
            double ty = (rng.uniform() * 2 - 1) * 0.18 * sv;
            double thickness = (0.040 + 0.055 * rng.uniform()) * span;
            // Severity also fades the stroke, so deviation shows up as a
            // weaker signal, not just a geometric warp.
            double amp = 1.0 - 0.72 * sv;
            double cr = std::cos(rot), sr = std::sin(rot);

            std::vector<Stroke> strokes = base;
            for (auto& stroke : strokes)
                for (auto& p : stroke) {
                    double wx = p.x + (rng.uniform() * 2 - 1) * 0.10 * sv;
                    double wy = p.y + (rng.uniform() * 2 - 1) * 0.10 * sv;
                    double cx = (wx - 0.5) * sx, cy = (wy - 0.5) * sy;
                    cx += shear * cy;
                    double rx = cr * cx - sr * cy, ry = sr * cx + cr * cy;
                    p.x = margin + (rx + 0.5 + tx) * span;
                    p.y = margin + (ry + 0.5 + ty) * span;
                }

            std::vector<std::uint8_t> img(side * side, 0);
            for (int y = 0; y < side; ++y)
                for (int x = 0; x < side; ++x) {
                    double d = 1e9;
                    for (const auto& stroke : strokes)
                        for (std::size_t k = 0; k + 1 < stroke.size(); ++k)
                            d = std::min(d, segment_distance(x + 0.5, y + 0.5,
                                                             stroke[k],
                                                             stroke[k + 1]));
                    double v = amp * 255.0 * std::clamp(thickness - d + 0.5, 0.0, 1.0);
                    img[y * side + x] = static_cast<std::uint8_t>(std::lround(v));
                }
            out.images.insert(out.images.end(), img.begin(), img.end());
            out.labels.push_back(static_cast<std::uint8_t>(digit));
        }
    }
    return out;
}

}  // namespace preflab
