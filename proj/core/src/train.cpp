#include "preflab/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "preflab/errors.hpp"
#include "preflab/rng.hpp"

namespace preflab {

void TrainConfig::validate() const {
    if (base_lr <= 0) throw InputError("TrainConfig: base_lr must be > 0");
    if (momentum < 0 || momentum >= 1)
        throw InputError("TrainConfig: momentum must be in [0, 1)");
    if (weight_decay < 0) throw InputError("TrainConfig: weight_decay must be >= 0");
    if (epochs < 1) throw InputError("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw InputError("TrainConfig: batch_size must be >= 1");
    for (std::size_t i = 1; i < lr_decay_epochs.size(); ++i) {
        if (lr_decay_epochs[i] <= lr_decay_epochs[i - 1])
            throw InputError("TrainConfig: lr_decay_epochs must be strictly increasing");
    }
}

double TrainConfig::lr_at(int epoch) const {
    double lr = base_lr;
    for (int d : lr_decay_epochs)
        if (d <= epoch) lr *= lr_decay_factor;
    return lr;
}

SgdOptimizer::SgdOptimizer(std::vector<Tensor>& params, TrainConfig config)
    : params_(&params), config_(std::move(config)) {
    config_.validate();
    velocity_.reserve(params.size());
    for (const Tensor& p : params)
        velocity_.emplace_back(static_cast<std::size_t>(p.size()), 0.0f);
}

void SgdOptimizer::step(int epoch) {
    const float lr = static_cast<float>(config_.lr_at(epoch));
    const float mom = static_cast<float>(config_.momentum);
    const float wd = static_cast<float>(config_.weight_decay);
    for (std::size_t i = 0; i < params_->size(); ++i) {
        Tensor& p = (*params_)[i];
        if (!p.has_grad())
            throw StateError("sgd_step: parameter " + std::to_string(i) +
                             " has no gradient; run backward first");
        auto g = p.grad();
        auto d = p.data();
        auto& v = velocity_[i];
        for (std::size_t j = 0; j < v.size(); ++j) {
            v[j] = mom * v[j] + g[j] + wd * d[j];
            d[j] -= lr * v[j];
        }
    }
}

void SgdOptimizer::zero_grad() {
    for (Tensor& p : *params_) p.zero_grad();
}

Tensor slice_batch(const Tensor& images, int begin, int end) {
    const auto& s = images.shape();
    std::int64_t row = images.size() / s[0];
    std::vector<int> shape = s;
    shape[0] = end - begin;
    std::vector<float> data(images.data().begin() + begin * row,
                            images.data().begin() + end * row);
    return Tensor::from_data(std::move(shape), std::move(data));
}

Tensor gather_batch(const Tensor& images, const std::vector<int>& indices) {
    const auto& s = images.shape();
    std::int64_t row = images.size() / s[0];
    std::vector<int> shape = s;
    shape[0] = static_cast<int>(indices.size());
    std::vector<float> data(static_cast<std::size_t>(row) * indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        std::copy_n(images.data().begin() + indices[i] * row, row,
                    data.begin() + static_cast<std::ptrdiff_t>(i) * row);
    }
    return Tensor::from_data(std::move(shape), std::move(data));
}

TrainResult train_classifier(MiniCnn& model, const Tensor& images,
                             const std::vector<int>& labels,
                             const TrainConfig& config) {
    config.validate();
    const int n = images.dim(0);
    if (static_cast<int>(labels.size()) != n)
        throw DimensionError("train_classifier: image batch axis " +
                             std::to_string(n) + " != label count " +
                             std::to_string(labels.size()));

    SgdOptimizer opt(model.parameters(), config);
    TrainResult result;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(config.seed, 0x5BAFF1E, epoch));
        for (int i = n - 1; i > 0; --i) {
            int j = static_cast<int>(shuffle_rng.below(i + 1));
            std::swap(order[i], order[j]);
        }
        double epoch_loss = 0.0;
        int batches = 0;
        for (int start = 0; start < n; start += config.batch_size) {
            int stop = std::min(n, start + config.batch_size);
            std::vector<int> idx(order.begin() + start, order.begin() + stop);
            Tensor batch = gather_batch(images, idx);
            std::vector<int> batch_labels(idx.size());
            for (std::size_t k = 0; k < idx.size(); ++k)
                batch_labels[k] = labels[idx[k]];

            opt.zero_grad();
            Tensor logits = model.forward(batch);
            Tensor loss = softmax_cross_entropy(logits, batch_labels);
            if (!std::isfinite(loss.item())) {
                result.diverged = true;
                return result;
            }
            backward(loss);
            opt.step(epoch);
            epoch_loss += loss.item();
            ++batches;
        }
        result.epoch_losses.push_back(epoch_loss / std::max(1, batches));
    }
    return result;
}

double evaluate_accuracy(const MiniCnn& model, const Tensor& images,
                         const std::vector<int>& labels, int batch_size) {
    const int n = images.dim(0);
    int correct = 0;
    for (int start = 0; start < n; start += batch_size) {
        int stop = std::min(n, start + batch_size);
        Tensor batch = slice_batch(images, start, stop);
        std::vector<int> pred = model.predict(batch);
        for (int k = 0; k < stop - start; ++k)
            if (pred[k] == labels[start + k]) ++correct;
    }
    return n ? static_cast<double>(correct) / n : 0.0;
}

}  // namespace preflab
