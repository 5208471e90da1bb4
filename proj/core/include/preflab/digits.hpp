#pragma once

#include <cstdint>

#include "preflab/mnistlab.hpp"

namespace preflab {

// Procedural stroke-font digit corpus in MNIST layout (28x28 grayscale,
// labels 0-9). Each image applies a seeded random affine distortion whose
// severity varies per image, so embedding distance to the class mean tracks
// how prototypical an example is.
IdxDataset synth_digit_corpus(int per_class, std::uint64_t seed, int side = 28);

}  // namespace preflab
