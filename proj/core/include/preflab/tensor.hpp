#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace preflab {

// Dense float32 n-d array with optional recorded gradient. Tensor is a
// cheap handle; copies share the underlying node, so a returned tensor
// stays attached to the autodiff graph that produced it.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
    static Tensor full(std::vector<int> shape, float value,
                       bool requires_grad = false);
    static Tensor from_data(std::vector<int> shape, std::vector<float> data,
                            bool requires_grad = false);
    static Tensor scalar(float value, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const std::vector<int>& shape() const;
    int dim(int axis) const;
    std::int64_t size() const;

    std::span<float> data();
    std::span<const float> data() const;

    bool requires_grad() const;
    bool has_grad() const;
    std::span<float> grad();
    std::span<const float> grad() const;
    void zero_grad();

    // True when every element (and gradient element, if present) is finite.
    bool all_finite() const;

    float item() const;  // scalar tensors only

    struct Node;
    const std::shared_ptr<Node>& node() const { return node_; }
    explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

private:
    std::shared_ptr<Node> node_;
};

// While a guard is alive no graph is recorded; forward results are plain
// values. Used for evaluation and embedding extraction.
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;
};

bool grad_enabled();

// ---- differentiable operations -------------------------------------------
// All convolutions are cross-correlations (no kernel flip).

// input [N,C,H,W], kernel [K,C,kh,kw] -> [N,K,H',W']
Tensor conv2d(const Tensor& input, const Tensor& kernel, int stride = 1,
              int pad = 0);

// x [N,C,H,W] + bias [C], broadcast over N,H,W
Tensor add_channel_bias(const Tensor& x, const Tensor& bias);

Tensor relu(const Tensor& x);

// 2x2 max pooling, stride 2; H and W must be even.
Tensor maxpool2(const Tensor& x);

// [N,C,H,W] -> [N,C]
Tensor global_avg_pool(const Tensor& x);

// x [N,D], weight [C,D], bias [C] -> [N,C]
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Mean over the batch of -log softmax(logits)[label]; max-stabilized.
Tensor softmax_cross_entropy(const Tensor& logits,
                             const std::vector<int>& labels);

Tensor sum(const Tensor& x);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor add(const Tensor& a, const Tensor& b);  // elementwise

// Row-wise softmax of [N,C]; not graph-recorded (evaluation helper).
Tensor softmax(const Tensor& logits);

// Populates grad on every parameter reachable from the recorded graph of
// `loss` (a scalar). Throws StateError when the same graph is walked twice.
void backward(Tensor& loss);

std::string shape_string(const std::vector<int>& shape);

}  // namespace preflab
