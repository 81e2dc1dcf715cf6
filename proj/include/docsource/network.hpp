#pragma once

#include <cstdint>
#include <memory>

#include "docsource/layers.hpp"

namespace docsource {

struct NetworkConfig {
    int patch_size = 18;    // p
    int class_count = 2;    // S
    int conv_filters = 50;
    int kernel = 3;
    int dense_units = 256;
    int epochs = 100;
    int batch_size = 64;
    double lr0 = 0.001;
    double decay = 0.0005;
    std::uint64_t seed = 0;
    double val_fraction = 0.1;

    void validate() const; // throws BadConfig
};

// Fixed stack:
//   Conv(3x3x1x50) -> BN -> Conv(3x3x50x50) -> BN -> ReLU
//   -> Conv(3x3x50x50) -> BN -> ReLU -> MaxPool(2,2)
//   -> Flatten -> Dense(256) -> ReLU -> Dense(S) -> Softmax
// The first block has no ReLU.
class Network {
public:
    explicit Network(const NetworkConfig& cfg);

    // Softmax scores (n, S). Training mode uses batch statistics in BN.
    Tensor forward(const Tensor& patches, bool train);

    // Accumulates parameter gradients for mean cross-entropy over the batch.
    // `scores` must be the output of the matching forward(train=true) call.
    void backward(const Tensor& scores, const std::vector<int>& labels);

    void zero_grads();
    std::vector<Param*> params(); // layer order, weights before biases
    std::vector<const Param*> params() const;

    long param_count(bool learnable_only) const;

    NetworkConfig config;
    ConvLayer conv1, conv2, conv3;
    BatchNormLayer bn1, bn2, bn3;
    ReluLayer relu2, relu3, relu_fc;
    MaxPoolLayer pool;
    DenseLayer fc1, fc2;

    int spatial_after_convs() const { return config.patch_size - 3 * (config.kernel - 1); }
    int flatten_dim() const {
        const int s = spatial_after_convs() / 2;
        return s * s * config.conv_filters;
    }
};

Network build_network(const NetworkConfig& cfg); // seeded initialization

} // namespace docsource
