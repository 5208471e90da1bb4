#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "preflab/nn.hpp"
#include "preflab/tensor.hpp"
#include "preflab/train.hpp"

namespace preflab {

// Grayscale image set with labels, the in-memory form of an IDX pair.
struct IdxDataset {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> images;  // n() * rows * cols, row-major
    std::vector<std::uint8_t> labels;

    std::size_t n() const { return labels.size(); }
    const std::uint8_t* image(std::size_t i) const {
        return images.data() + i * rows * cols;
    }
    void validate() const;  // throws FormatError on inconsistency
};

// IDX codecs. Errors carry the byte offset of the problem.
struct IdxImages {
    int rows = 0, cols = 0;
    std::vector<std::uint8_t> data;  // n * rows * cols
    std::size_t n = 0;
};
IdxImages parse_idx_images(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images);
std::vector<std::uint8_t> serialize_idx_labels(const std::vector<std::uint8_t>& labels);

IdxDataset load_idx(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path);
void save_idx(const IdxDataset& dataset,
              const std::filesystem::path& images_path,
              const std::filesystem::path& labels_path);

// [N,1,rows,cols] float tensor, values scaled to [0,1].
Tensor idx_to_tensor(const IdxDataset& dataset);
std::vector<int> idx_labels(const IdxDataset& dataset);

// Zero-filled canvas of `side` with the digits centered.
IdxDataset pad_centered(const IdxDataset& dataset, int side);

struct DeviationSegment {
    double q = 1.0;
    std::vector<std::vector<int>> kept_per_class;  // indices into the source
};

// Per class: embed every image with `embedder`, keep the ceil(q*n) closest
// (Euclidean) to the class mean, replicate the kept set cyclically back to
// the class size. Returns the segment plus the replicated dataset.
struct SegmentResult {
    DeviationSegment segment;
    IdxDataset dataset;
};
SegmentResult segment_by_deviation(const IdxDataset& dataset,
                                   const MiniCnn& embedder, double q);

struct ShiftMnistConfig {
    int canvas_side = 32;
    std::uint8_t pixel_intensity = 255;
    // (row, col) of the class pixel per label; defaults keep row 1 clear of
    // the centered 28x28 digit region.
    std::vector<std::pair<int, int>> pixel_positions;

    static ShiftMnistConfig defaults();
    void validate(int digit_rows, int digit_cols) const;  // throws InputError
};

enum class ShiftMode { train, digits_only, pixel_only, both };
const char* shift_mode_name(ShiftMode m);

// Digit pasted centered on the canvas (omitted for pixel_only); the
// class-conditional pixel set for train/both/pixel_only.
IdxDataset build_shift_mnist(const IdxDataset& dataset,
                             const ShiftMnistConfig& cfg, ShiftMode mode);

struct ShiftPointResult {
    double q = 1.0;
    int run = 0;
    double digits_only = 0.0;
    double pixel_only = 0.0;
    double both = 0.0;
};

struct ShiftExperimentConfig {
    TrainConfig train;
    MiniCnnConfig model;  // input side/channels set internally
    ShiftMnistConfig shift = ShiftMnistConfig::defaults();
    TrainConfig embedder_train;  // for the clean-MNIST embedder
    int n_runs = 2;
    std::uint64_t seed = 0;
};

struct ShiftExperimentResult {
    std::vector<ShiftPointResult> points;       // per (q, run)
    std::vector<ShiftPointResult> means;        // per q, averaged over runs
    double clean_accuracy = 0.0;                // embedder on the clean test set
};

// For each q: segment the training set in the embedder's latent space,
// build the pixel-augmented training set, train, and evaluate on the three
// shifted test sets.
ShiftExperimentResult run_shift_experiment(const IdxDataset& train_set,
                                           const IdxDataset& test_set,
                                           const std::vector<double>& q_values,
                                           const ShiftExperimentConfig& cfg);

}  // namespace preflab
