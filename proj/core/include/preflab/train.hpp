#pragma once

#include <cstdint>
#include <vector>

#include "preflab/nn.hpp"
#include "preflab/tensor.hpp"

namespace preflab {

struct TrainConfig {
    int epochs = 30;
    double base_lr = 0.01;
    std::vector<int> lr_decay_epochs = {15, 25};
    double lr_decay_factor = 0.1;
    double momentum = 0.9;
    double weight_decay = 1e-4;
    int batch_size = 32;
    std::uint64_t seed = 0;

    void validate() const;  // throws InputError
    double lr_at(int epoch) const;
};

// Heavy-ball SGD with decoupled-from-nothing L2 (weight decay is added to
// the gradient, matching the reference recipe):
//   v <- momentum*v + grad + weight_decay*param;  param <- param - lr*v
class SgdOptimizer {
public:
    SgdOptimizer(std::vector<Tensor>& params, TrainConfig config);
    void step(int epoch);  // throws StateError when grads are missing
    void zero_grad();

private:
    std::vector<Tensor>* params_;
    TrainConfig config_;
    std::vector<std::vector<float>> velocity_;
};

struct TrainResult {
    std::vector<double> epoch_losses;
    bool diverged = false;  // NaN/Inf loss encountered; training aborted
};

// In-memory supervised training. `images` is [N,C,S,S]; labels.size() == N.
// Batch order is a seeded shuffle per epoch; fully deterministic.
TrainResult train_classifier(MiniCnn& model, const Tensor& images,
                             const std::vector<int>& labels,
                             const TrainConfig& config);

// Fraction of correct predictions, batched evaluation.
double evaluate_accuracy(const MiniCnn& model, const Tensor& images,
                         const std::vector<int>& labels, int batch_size = 64);

// Rows n0..n1 of a [N,C,H,W] tensor as a new tensor (no grad).
Tensor slice_batch(const Tensor& images, int begin, int end);
Tensor gather_batch(const Tensor& images, const std::vector<int>& indices);

}  // namespace preflab
