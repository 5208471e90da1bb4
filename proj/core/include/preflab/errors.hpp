#pragma once

#include <stdexcept>
#include <string>

namespace preflab {

// Bad shapes, out-of-range arguments, malformed specs.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Dimension mismatches between tensors; message names the offending axes.
struct DimensionError : InputError {
    using InputError::InputError;
};

// Operation called in the wrong phase (backward twice, missing grads, ...).
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

// Malformed external bytes (IDX, PPM, config, CSV); message carries offset
// or line where known.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem failures; message carries the path.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scene composition could not place features without overlap.
struct PlacementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A manipulation was requested on a feature kind that does not support it.
struct UnsupportedManipulationError : InputError {
    using InputError::InputError;
};

// Rank-deficient regression design.
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace preflab
