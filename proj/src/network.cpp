#include "docsource/network.hpp"

namespace docsource {

void NetworkConfig::validate() const {
    if (class_count < 2) throw BadConfig("class_count must be >= 2");
    if (kernel != 3) throw BadConfig("only 3x3 kernels supported");
    const int after = patch_size - 3 * (kernel - 1);
    if (after < 2) throw BadConfig("patch_size too small for three convs + pool");
    if (batch_size < 2) throw BadConfig("batch_size must be >= 2 (batchnorm)");
    if (epochs < 1) throw BadConfig("epochs must be >= 1");
    if (val_fraction <= 0.0 || val_fraction >= 1.0)
        throw BadConfig("val_fraction must be in (0,1)");
    if (conv_filters < 1 || dense_units < 1) throw BadConfig("bad layer sizes");
}

namespace {
NetworkConfig validated(NetworkConfig cfg) {
    cfg.validate();
    return cfg;
}
} // namespace

Network::Network(const NetworkConfig& cfg)
    : config(validated(cfg)),
      conv1(1, cfg.conv_filters, cfg.kernel),
      conv2(cfg.conv_filters, cfg.conv_filters, cfg.kernel),
      conv3(cfg.conv_filters, cfg.conv_filters, cfg.kernel),
      bn1(cfg.conv_filters),
      bn2(cfg.conv_filters),
      bn3(cfg.conv_filters),
      fc1(flatten_dim(), cfg.dense_units),
      fc2(cfg.dense_units, cfg.class_count) {}

Network build_network(const NetworkConfig& cfg) {
    Network net(cfg);
    Rng rng(mix_seed(cfg.seed, 0x1717));
    net.conv1.init_weights(rng);
    net.conv2.init_weights(rng);
    net.conv3.init_weights(rng);
    net.fc1.init_weights(rng);
    net.fc2.init_weights(rng);
    return net;
}

Tensor Network::forward(const Tensor& patches, bool train) {
    if (patches.h != config.patch_size || patches.w != config.patch_size || patches.c != 1)
        throw ShapeMismatch("network input must be (n, p, p, 1)");
    Tensor t = conv1.forward(patches);
    t = bn1.forward(t, train);
    t = conv2.forward(t);
    t = bn2.forward(t, train);
    t = relu2.forward(t);
    t = conv3.forward(t);
    t = bn3.forward(t, train);
    t = relu3.forward(t);
    t = pool.forward(t);
    t.h = 1; t.w = 1; t.c = flatten_dim(); // flatten
    t = fc1.forward(t);
    t = relu_fc.forward(t);
    t = fc2.forward(t);
    return softmax(t);
}

void Network::backward(const Tensor& scores, const std::vector<int>& labels) {
    Tensor d = softmax_cross_entropy_backward(scores, labels);
    d = fc2.backward(d);
    d = relu_fc.backward(d);
    d = fc1.backward(d);
    const int s = spatial_after_convs() / 2;
    d.h = s; d.w = s; d.c = config.conv_filters; // unflatten
    d = pool.backward(d);
    d = relu3.backward(d);
    d = bn3.backward(d);
    d = conv3.backward(d);
    d = relu2.backward(d);
    d = bn2.backward(d);
    d = conv2.backward(d);
    d = bn1.backward(d);
    conv1.backward(d);
}

void Network::zero_grads() {
    for (Param* p : params()) p->grad.setZero();
}

std::vector<Param*> Network::params() {
    return {&conv1.weights, &conv1.bias, &bn1.gamma, &bn1.beta,
            &conv2.weights, &conv2.bias, &bn2.gamma, &bn2.beta,
            &conv3.weights, &conv3.bias, &bn3.gamma, &bn3.beta,
            &fc1.weights,   &fc1.bias,
            &fc2.weights,   &fc2.bias};
}

std::vector<const Param*> Network::params() const {
    return {&conv1.weights, &conv1.bias, &bn1.gamma, &bn1.beta,
            &conv2.weights, &conv2.bias, &bn2.gamma, &bn2.beta,
            &conv3.weights, &conv3.bias, &bn3.gamma, &bn3.beta,
            &fc1.weights,   &fc1.bias,
            &fc2.weights,   &fc2.bias};
}

long Network::param_count(bool learnable_only) const {
    long total = 0;
    for (const Param* p : params()) total += long(p->value.size());
    if (!learnable_only) total += 3 * 2 * config.conv_filters; // BN running stats
    return total;
}

} // namespace docsource
