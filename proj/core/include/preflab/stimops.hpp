#pragma once

#include "preflab/image.hpp"

namespace preflab {

struct MaskedStimulus {
    Image image;
    Mask mask;  // 1 = object
    enum class Provenance { synthetic, external } provenance =
        Provenance::synthetic;

    void validate() const;  // throws InputError on size mismatch
};

// Replaces every background (mask = 0) pixel with `fill`; object pixels are
// untouched. Idempotent.
Image exterior_mask(const MaskedStimulus& stim, Rgb fill = {255, 255, 255});

// Background pixels become (1-lambda)*masked + lambda*original (rounded to
// nearest); object pixels come from `original`.
Image background_interpolate(const Image& original, const Image& masked,
                             const Mask& mask, double lambda);

// Supersampled downscale of image and mask by `scale` (0, 1], centered
// on a fill canvas of the original size. Aspect ratio is preserved exactly;
// throws InputError when the object vanishes.
MaskedStimulus resize_with_pad(const MaskedStimulus& stim, double scale,
                               Rgb fill = {0, 0, 0});

}  // namespace preflab
