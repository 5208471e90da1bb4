#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "preflab/pairs.hpp"
#include "preflab/render.hpp"
#include "preflab/tensor.hpp"

namespace preflab {

// The ten features with their pixel budgets. Budgets default to the
// large/medium/small grouping: large {square, blue, banded}, medium
// {triangle, green, yellow, wavy} (the spare color joins the medium group),
// small {plus, red, blocky}.
struct FeatureCatalog {
    std::vector<FeatureSpec> features;

    const FeatureSpec& by_id(const std::string& id) const;  // throws InputError
    FeatureSpec& by_id(const std::string& id);
    std::vector<std::string> ids() const;
};

FeatureCatalog default_catalog(int large = 140, int medium = 100, int small = 55);

// Catalog with large and small budgets exchanged (the reversal experiment).
FeatureCatalog swapped_catalog(int large = 140, int medium = 100, int small = 55);

// Every feature at the same budget (the equivalency experiment).
FeatureCatalog matched_catalog(int count = 100);

struct DatasetSpec {
    // The 5 classes of one pairs-matrix round, as feature-id pairs.
    std::vector<FeaturePair> class_pairs;
    FeatureCatalog catalog;
    SceneConfig scene;
    int n_train = 100;
    int n_val = 30;
    int n_test = 30;
    int n_conflict = 30;
    std::uint64_t seed = 0;
    int dataset_index = 0;

    void validate() const;  // throws InputError
};

enum class Split { train, val, test };
const char* split_name(Split s);

// Images as a [N, 3, crop, crop] float tensor (scaled to [0,1], then
// normalized per scene.normalization), plus per-image class labels.
struct SplitData {
    Tensor images;
    std::vector<int> labels;
};

// Renders one split fully in memory. Training images honor each feature's
// predictivity: a feature with predictivity p appears in exactly
// round(p * n_train) of its class's training images (seeded selection);
// val/test always contain both features.
SplitData render_split(const DatasetSpec& spec, Split split);

// Same rendering, persisted as root/<split>/<class>/<index>.ppm plus a
// manifest listing every file with a content hash. Returns the manifest
// text. Throws IoError on write failure.
std::string build_dataset(const DatasetSpec& spec,
                          const std::filesystem::path& root);

// Reads a split written by build_dataset back into tensors.
SplitData load_split(const std::filesystem::path& root, Split split,
                     const SceneConfig& scene);

// [N,3,S,S] float tensor from images (scaled to [0,1], then normalized per
// scene.normalization). All images must share dimensions.
Tensor images_to_tensor(const std::vector<Image>& images,
                        const SceneConfig& scene);

// FNV-1a 64-bit, used for file and config hashes.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64(const std::string& s);

}  // namespace preflab
