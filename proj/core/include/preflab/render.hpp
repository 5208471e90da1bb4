#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "preflab/image.hpp"
#include "preflab/rng.hpp"

namespace preflab {

enum class FeatureKind { shape, color, texture };

enum class FeatureVariant {
    // shapes (solid white fills)
    triangle,
    square,
    plus,
    // colors (solid discs)
    red,
    green,
    blue,
    yellow,
    // textures (pattern-filled discs)
    banded,
    blocky,
    wavy,
};

FeatureKind kind_of(FeatureVariant v);
const char* variant_name(FeatureVariant v);
FeatureVariant variant_from_name(const std::string& name);

// Variant hues in degrees; saturation and value are 1.
double variant_hue(FeatureVariant v);

struct FeatureInterpolation {
    std::string partner_id;
    FeatureVariant partner_variant;
    double alpha = 0.0;  // 0 = this feature's hue, 1 = partner's hue
};

struct FeatureSpec {
    std::string id;
    FeatureKind kind = FeatureKind::shape;
    FeatureVariant variant = FeatureVariant::square;
    int target_pixel_count = 0;
    double hue_deviation_eps = 0.0;  // degrees, U(-eps, eps) per image
    std::optional<FeatureInterpolation> interpolation;
    double predictivity = 1.0;

    void validate() const;  // throws InputError
    double effective_hue() const;
};

FeatureSpec make_feature(FeatureVariant variant, int target_pixel_count);

// The ten elementary features in canonical order.
std::vector<FeatureVariant> all_variants();

struct SceneConfig {
    int canvas_side = 64;
    int feature_box_side = 48;
    int pad = 8;
    int crop_side = 56;
    // Box each feature is rasterized into. 20 px leaves enough slack in the
    // 48-px feature box that rejection-sampled non-overlapping placement
    // succeeds with probability ~0.2 per attempt.
    int feature_render_side = 20;
    Rgb background{0, 0, 0};
    enum class Normalization { none, imagenet } normalization = Normalization::none;

    void validate() const;
    static SceneConfig desk_scale() { return {}; }
    static SceneConfig paper_scale();
};

struct RenderedFeature {
    Image image;
    Mask mask;  // silhouette: shape fill or full disc for colors/textures
};

// Rasterizes `spec` into a box_side x box_side image against black, hitting
// target_pixel_count lit (non-black) pixels to within +/-2% (exactly, when
// the raster scale alone cannot get that close). Pure in (spec, box_side,
// seed).
RenderedFeature render_feature(const FeatureSpec& spec, int box_side,
                               std::uint64_t rng_seed);

// Largest lit-pixel count this variant can reach inside box_side.
std::int64_t max_pixel_count(FeatureVariant variant, int box_side,
                             std::uint64_t rng_seed = 0);

// One hue shift U(-eps, eps) drawn from `rng`, applied to every non-black
// pixel; saturation/value preserved; hue wraps modulo 360.
Image apply_hue_deviation(const Image& image, double eps, Rng& rng);

// Hue of spec_a moved toward spec_b along the shorter arc; pixel count of
// spec_a retained. Both specs must be color features.
FeatureSpec interpolate_feature(const FeatureSpec& spec_a,
                                const FeatureSpec& spec_b, double alpha);

// Interpolated hue along the shorter arc, in [0, 360).
double interpolate_hue(double hue_a, double hue_b, double alpha);

struct ComposedScene {
    Image image;
    Mask mask;  // union silhouette, aligned with the cropped image
};

// Places each feature's render box at a uniformly random, non-overlapping
// position inside the feature box, then randomly crops the padded canvas to
// crop_side. Accepts 1 or 2 features (predictivity drops are handled by the
// caller passing fewer features). Throws PlacementError after 100 failed
// placement attempts.
ComposedScene compose_scene(const std::vector<FeatureSpec>& features,
                            const SceneConfig& scene, std::uint64_t rng_seed);

}  // namespace preflab
