#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "preflab/tensor.hpp"

namespace preflab {

struct MiniCnnConfig {
    int input_side = 56;
    int in_channels = 3;
    std::vector<int> channels = {16, 32, 64};
    int num_classes = 5;
    std::uint64_t seed = 0;

    void validate() const;  // throws InputError
    std::string to_text() const;
    static MiniCnnConfig from_text(const std::string& text);
};

// Blocks of [conv3x3 -> ReLU -> conv3x3 -> ReLU -> maxpool2x2], one block per
// channel entry, then global average pool and a single linear head. Weights
// are Kaiming-uniform fan-in, biases zero, all seeded.
class MiniCnn {
public:
    explicit MiniCnn(MiniCnnConfig config);

    const MiniCnnConfig& config() const { return config_; }

    // images [N,in_channels,S,S] -> logits [N,num_classes]
    Tensor forward(const Tensor& images) const;

    // Pooled penultimate activations [N,D], D = channels.back(). Never
    // graph-recorded.
    Tensor embed(const Tensor& images) const;

    // Greedy class predictions; ties break toward the lowest class index.
    std::vector<int> predict(const Tensor& images) const;

    std::vector<Tensor>& parameters() { return params_; }
    const std::vector<Tensor>& parameters() const { return params_; }
    int embedding_dim() const { return config_.channels.back(); }

    // Flat binary checkpoint: magic "PLAB", version, length-prefixed config
    // text, then parameters in declaration order as little-endian float32.
    void save(const std::filesystem::path& path) const;
    static MiniCnn load(const std::filesystem::path& path);

private:
    Tensor trunk(const Tensor& images) const;  // [N,D] pooled features

    MiniCnnConfig config_;
    std::vector<Tensor> params_;  // convW,convB per conv, then headW, headB
};

}  // namespace preflab
