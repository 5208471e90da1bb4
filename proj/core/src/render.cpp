#include "preflab/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "preflab/errors.hpp"

namespace preflab {

FeatureKind kind_of(FeatureVariant v) {
    switch (v) {
        case FeatureVariant::triangle:
        case FeatureVariant::square:
        case FeatureVariant::plus:
            return FeatureKind::shape;
        case FeatureVariant::red:
        case FeatureVariant::green:
        case FeatureVariant::blue:
        case FeatureVariant::yellow:
            return FeatureKind::color;
        default:
            return FeatureKind::texture;
    }
}

const char* variant_name(FeatureVariant v) {
    switch (v) {
        case FeatureVariant::triangle: return "triangle";
        case FeatureVariant::square: return "square";
        case FeatureVariant::plus: return "plus";
        case FeatureVariant::red: return "red";
        case FeatureVariant::green: return "green";
        case FeatureVariant::blue: return "blue";
        case FeatureVariant::yellow: return "yellow";
        case FeatureVariant::banded: return "banded";
        case FeatureVariant::blocky: return "blocky";
        case FeatureVariant::wavy: return "wavy";
    }
    return "?";
}

FeatureVariant variant_from_name(const std::string& name) {
    for (FeatureVariant v : all_variants())
        if (name == variant_name(v)) return v;
    throw InputError("unknown feature variant '" + name + "'");
}

double variant_hue(FeatureVariant v) {
    switch (v) {
        case FeatureVariant::red: return 0.0;
        case FeatureVariant::yellow: return 60.0;
        case FeatureVariant::green: return 120.0;
        case FeatureVariant::blue: return 240.0;
        default:
            throw UnsupportedManipulationError(
                std::string("variant '") + variant_name(v) + "' has no hue");
    }
}

std::vector<FeatureVariant> all_variants() {
    return {FeatureVariant::triangle, FeatureVariant::square,
            FeatureVariant::plus,     FeatureVariant::red,
            FeatureVariant::green,    FeatureVariant::blue,
            FeatureVariant::yellow,   FeatureVariant::banded,
            FeatureVariant::blocky,   FeatureVariant::wavy};
}

void FeatureSpec::validate() const {
    if (target_pixel_count <= 0)
        throw InputError("FeatureSpec '" + id + "': target_pixel_count must be > 0");
    if (hue_deviation_eps < 0 || hue_deviation_eps > 180)
        throw InputError("FeatureSpec '" + id + "': eps must be in [0, 180]");
    if (predictivity < 0 || predictivity > 1)
        throw InputError("FeatureSpec '" + id + "': predictivity must be in [0, 1]");
    if (interpolation && (interpolation->alpha < 0 || interpolation->alpha > 1))
        throw InputError("FeatureSpec '" + id + "': alpha must be in [0, 1]");
    if (kind != kind_of(variant))
        throw InputError("FeatureSpec '" + id + "': kind does not match variant");
}

double FeatureSpec::effective_hue() const {
    double base = variant_hue(variant);
    if (!interpolation) return base;
    return interpolate_hue(base, variant_hue(interpolation->partner_variant),
                           interpolation->alpha);
}

FeatureSpec make_feature(FeatureVariant variant, int target_pixel_count) {
    FeatureSpec spec;
    spec.id = variant_name(variant);
    spec.kind = kind_of(variant);
    spec.variant = variant;
    spec.target_pixel_count = target_pixel_count;
    return spec;
}

void SceneConfig::validate() const {
    if (feature_box_side + 2 * pad != canvas_side)
        throw InputError("SceneConfig: feature_box_side + 2*pad != canvas_side");
    if (crop_side > canvas_side || crop_side <= 0)
        throw InputError("SceneConfig: crop_side must be in (0, canvas_side]");
    if (feature_render_side <= 0 || feature_render_side > feature_box_side)
        throw InputError("SceneConfig: feature_render_side must fit the feature box");
}

SceneConfig SceneConfig::paper_scale() {
    SceneConfig s;
    s.canvas_side = 256;
    s.feature_box_side = 192;
    s.pad = 32;
    s.crop_side = 224;
    s.feature_render_side = 64;
    return s;
}

namespace {

constexpr int kScaleDenom = 64;  // raster scale fixed point, 1/64 px
constexpr double kTolerance = 0.02;

bool texture_pattern(FeatureVariant v, int x, int y, std::uint64_t seed) {
    switch (v) {
        case FeatureVariant::banded:
            return (y / 4) % 2 == 0;
        case FeatureVariant::wavy: {
            double shifted =
                (y + 4.0 * std::sin(2.0 * std::numbers::pi * x / 16.0)) / 4.0;
            long long band = static_cast<long long>(std::floor(shifted));
            return ((band % 2) + 2) % 2 == 0;
        }
        case FeatureVariant::blocky: {
            // Exactly one block of each horizontal block pair is on, so the
            // density is 0.5 regardless of seed and pixel-count targeting
            // always has headroom.
            const int bx = x / 4, by = y / 4;
            const std::uint64_t pick =
                derive_seed(seed, 0xB10C, static_cast<std::uint64_t>(bx >> 1),
                            static_cast<std::uint64_t>(by)) & 1;
            return static_cast<std::uint64_t>(bx & 1) == pick;
        }
        default:
            return true;
    }
}

struct Raster {
    Mask silhouette;
    Mask lit;
};

// Rasterizes the variant at continuous size s (side for shapes, diameter
// for discs) centered on the box. Inclusion regions are nested in s, so
// lit counts are monotone and binary-searchable.
Raster rasterize(FeatureVariant v, double s, int box, std::uint64_t seed) {
    Raster r{Mask(box, box), Mask(box, box)};
    const double c = (box - 1) / 2.0;
    const FeatureKind kind = kind_of(v);
    for (int y = 0; y < box; ++y) {
        for (int x = 0; x < box; ++x) {
            const double dx = x - c, dy = y - c;
            bool inside = false;
            switch (v) {
                case FeatureVariant::square:
                    inside = std::max(std::abs(dx), std::abs(dy)) <= s / 2.0;
                    break;
                case FeatureVariant::plus:
                    inside = (std::abs(dx) <= s / 6.0 && std::abs(dy) <= s / 2.0) ||
                             (std::abs(dy) <= s / 6.0 && std::abs(dx) <= s / 2.0);
                    break;
                case FeatureVariant::triangle: {
                    // Equilateral, apex up, centroid at the box center.
                    const double h = s * std::numbers::sqrt3 / 2.0;
                    const double top = -2.0 * h / 3.0, bottom = h / 3.0;
                    if (dy < top || dy > bottom) break;
                    const double half_width = (dy - top) / std::numbers::sqrt3;
                    inside = std::abs(dx) <= half_width;
                    break;
                }
                default:  // colors and textures: disc of diameter s
                    inside = dx * dx + dy * dy <= (s / 2.0) * (s / 2.0);
                    break;
            }
            if (!inside) continue;
            r.silhouette.set(x, y, true);
            bool on = kind != FeatureKind::texture || texture_pattern(v, x, y, seed);
            if (on) r.lit.set(x, y, true);
        }
    }
    return r;
}

double max_scale(FeatureVariant v, int box) {
    switch (v) {
        case FeatureVariant::square:
            return box;
        case FeatureVariant::plus:
            return box - 1;
        case FeatureVariant::triangle:
            // Apex extends 2h/3 above the centroid.
            return (box - 1) * std::numbers::sqrt3 / 2.0;
        default:
            return box - 1;
    }
}

// Removes `excess` lit pixels, farthest from the feature center first
// (scan-order tiebreak), keeping the interior solid. Shapes and colors also
// drop the pixel from the silhouette; texture silhouettes stay the full disc.
void trim_lit(Raster& r, std::int64_t excess, bool trim_silhouette) {
    const int box = r.lit.width;
    const double c = (box - 1) / 2.0;
    struct Px { double d2; int x, y; };
    std::vector<Px> lit;
    for (int y = 0; y < box; ++y)
        for (int x = 0; x < box; ++x)
            if (r.lit.at(x, y))
                lit.push_back({(x - c) * (x - c) + (y - c) * (y - c), x, y});
    std::stable_sort(lit.begin(), lit.end(),
                     [](const Px& a, const Px& b) { return a.d2 > b.d2; });
    for (std::int64_t i = 0; i < excess; ++i) {
        r.lit.set(lit[i].x, lit[i].y, false);
        if (trim_silhouette) r.silhouette.set(lit[i].x, lit[i].y, false);
    }
}

Raster rasterize_at_target(const FeatureSpec& spec, int box, std::uint64_t seed) {
    const std::int64_t target = spec.target_pixel_count;
    const int kmax =
        static_cast<int>(max_scale(spec.variant, box) * kScaleDenom);
    auto count_at = [&](int k) {
        return rasterize(spec.variant, static_cast<double>(k) / kScaleDenom, box,
                         seed).lit.count();
    };
    if (static_cast<double>(count_at(kmax)) < 0.98 * static_cast<double>(target)) {
        throw InputError("render_feature '" + spec.id + "': target pixel count " +
                         std::to_string(target) + " unachievable in a " +
                         std::to_string(box) + "px box");
    }
    // Smallest k whose count reaches the target.
    int lo = 1, hi = kmax;
    while (lo < hi) {
        int mid = lo + (hi - lo) / 2;
        if (count_at(mid) >= target) hi = mid;
        else lo = mid + 1;
    }
    std::int64_t over = count_at(lo);
    std::int64_t under = lo > 1 ? count_at(lo - 1) : 0;
    int k = (target - under <= over - target && lo > 1) ? lo - 1 : lo;
    std::int64_t count = k == lo ? over : under;

    Raster r = rasterize(spec.variant, static_cast<double>(k) / kScaleDenom, box,
                         seed);
    std::int64_t err = count - target;
    if (std::abs(err) > static_cast<std::int64_t>(kTolerance * target)) {
        // The raster scale alone cannot get within tolerance; take the next
        // size up and peel boundary pixels to the exact target.
        if (count < target) {
            r = rasterize(spec.variant, static_cast<double>(lo) / kScaleDenom,
                          box, seed);
            count = over;
        }
        trim_lit(r, count - target, kind_of(spec.variant) != FeatureKind::texture);
    }
    return r;
}

}  // namespace

std::int64_t max_pixel_count(FeatureVariant variant, int box_side,
                             std::uint64_t rng_seed) {
    return rasterize(variant, max_scale(variant, box_side), box_side, rng_seed)
        .lit.count();
}

RenderedFeature render_feature(const FeatureSpec& spec, int box_side,
                               std::uint64_t rng_seed) {
    spec.validate();
    Raster r = rasterize_at_target(spec, box_side, rng_seed);
    Image img(box_side, box_side, Rgb{0, 0, 0});
    Rgb color{255, 255, 255};
    if (spec.kind == FeatureKind::color)
        color = hsv_to_rgb({spec.effective_hue(), 1.0, 1.0});
    for (int y = 0; y < box_side; ++y)
        for (int x = 0; x < box_side; ++x)
            if (r.lit.at(x, y)) img.set(x, y, color);
    return {std::move(img), std::move(r.silhouette)};
}

Image apply_hue_deviation(const Image& image, double eps, Rng& rng) {
    if (eps < 0) throw InputError("apply_hue_deviation: eps must be >= 0");
    const double delta = rng.uniform(-eps, eps);
    if (eps == 0.0) return image;
    Image out = image;
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            Rgb c = out.get(x, y);
            if (c.r == 0 && c.g == 0 && c.b == 0) continue;
            Hsv hsv = rgb_to_hsv(c);
            hsv.h = std::fmod(hsv.h + delta + 720.0, 360.0);
            out.set(x, y, hsv_to_rgb(hsv));
        }
    }
    return out;
}

double interpolate_hue(double hue_a, double hue_b, double alpha) {
    double diff = std::fmod(hue_b - hue_a + 540.0, 360.0) - 180.0;
    double h = std::fmod(hue_a + alpha * diff + 720.0, 360.0);
    return h;
}

FeatureSpec interpolate_feature(const FeatureSpec& spec_a,
                                const FeatureSpec& spec_b, double alpha) {
    if (spec_a.kind != FeatureKind::color || spec_b.kind != FeatureKind::color) {
        throw UnsupportedManipulationError(
            "interpolate_feature: both features must be color variants (got '" +
            spec_a.id + "', '" + spec_b.id + "')");
    }
    if (alpha < 0 || alpha > 1)
        throw InputError("interpolate_feature: alpha must be in [0, 1]");
    FeatureSpec out = spec_a;
    out.interpolation = FeatureInterpolation{spec_b.id, spec_b.variant, alpha};
    return out;
}

ComposedScene compose_scene(const std::vector<FeatureSpec>& features,
                            const SceneConfig& scene, std::uint64_t rng_seed) {
    scene.validate();
    if (features.size() > 2)
        throw InputError("compose_scene: expected at most 2 features, got " +
                         std::to_string(features.size()));
    Rng rng(rng_seed);

    std::vector<RenderedFeature> rendered;
    for (std::size_t i = 0; i < features.size(); ++i) {
        RenderedFeature rf = render_feature(
            features[i], scene.feature_render_side,
            derive_seed(rng_seed, 0xFEA7, i));
        // Always consume one deviation draw so layouts match across eps
        // settings for the same seed.
        rf.image = apply_hue_deviation(rf.image, features[i].hue_deviation_eps, rng);
        rendered.push_back(std::move(rf));
    }

    const int rs = scene.feature_render_side;
    const int span = scene.feature_box_side - rs + 1;
    std::vector<std::pair<int, int>> pos(features.size());
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
        for (auto& p : pos)
            p = {static_cast<int>(rng.below(span)), static_cast<int>(rng.below(span))};
        placed = pos.size() < 2 ||
                 std::abs(pos[0].first - pos[1].first) >= rs ||
                 std::abs(pos[0].second - pos[1].second) >= rs;
    }
    if (!placed)
        throw PlacementError(
            "compose_scene: could not place features without overlap after 100 attempts");

    Image canvas(scene.canvas_side, scene.canvas_side, scene.background);
    Mask mask(scene.canvas_side, scene.canvas_side);
    for (std::size_t i = 0; i < rendered.size(); ++i) {
        const int ox = scene.pad + pos[i].first, oy = scene.pad + pos[i].second;
        for (int y = 0; y < rs; ++y)
            for (int x = 0; x < rs; ++x) {
                Rgb c = rendered[i].image.get(x, y);
                if (c.r | c.g | c.b) canvas.set(ox + x, oy + y, c);
                if (rendered[i].mask.at(x, y)) mask.set(ox + x, oy + y, true);
            }
    }

    const int crop_span = scene.canvas_side - scene.crop_side + 1;
    const int cx = static_cast<int>(rng.below(crop_span));
    const int cy = static_cast<int>(rng.below(crop_span));
    ComposedScene out;
    out.image = Image(scene.crop_side, scene.crop_side);
    out.mask = Mask(scene.crop_side, scene.crop_side);
    for (int y = 0; y < scene.crop_side; ++y)
        for (int x = 0; x < scene.crop_side; ++x) {
            out.image.set(x, y, canvas.get(cx + x, cy + y));
            out.mask.set(x, y, mask.at(cx + x, cy + y));
        }
    return out;
}

}  // namespace preflab
