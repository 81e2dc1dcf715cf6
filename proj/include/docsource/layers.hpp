#pragma once

#include <string>
#include <vector>

#include "docsource/rng.hpp"
#include "docsource/tensor.hpp"

namespace docsource {

// One learnable block: flat values plus a matching gradient accumulator.
struct Param {
    std::string name;
    std::vector<int> shape;
    Eigen::ArrayXd value;
    Eigen::ArrayXd grad;

    void init(std::string n, std::vector<int> s) {
        name = std::move(n);
        shape = std::move(s);
        Eigen::Index total = 1;
        for (int d : shape) total *= d;
        value = Eigen::ArrayXd::Zero(total);
        grad = Eigen::ArrayXd::Zero(total);
    }
};

// 3x3 valid convolution, stride 1, channel-last. Weight layout
// (ky, kx, in_c, out_c); im2col + GEMM on both passes.
class ConvLayer {
public:
    ConvLayer(int in_c, int out_c, int k = 3);

    void init_weights(Rng& rng); // He-normal fan-in, zero bias
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy); // accumulates into W.grad / b.grad

    Param weights, bias;
    int in_c, out_c, k;

private:
    Tensor last_input_; // needed for col2im geometry + dW
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> cols_;
};

// Per-channel batch normalization over (batch, h, w); eps 1e-5, running
// statistics updated as new = momentum*old + (1-momentum)*batch.
class BatchNormLayer {
public:
    explicit BatchNormLayer(int channels, double momentum = 0.99);

    Tensor forward(const Tensor& x, bool train);
    Tensor backward(const Tensor& dy);

    Param gamma, beta;
    Eigen::ArrayXd running_mean, running_var;
    int channels;
    double momentum;
    static constexpr double kEps = 1e-5;

private:
    Tensor xhat_;
    Eigen::ArrayXd inv_std_;
    Eigen::Index rows_per_channel_ = 0;
};

class ReluLayer {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

private:
    Tensor last_input_;
};

// 2x2 max pool, stride 2; odd trailing row/col dropped. Gradient goes to the
// first-index argmax of each window.
class MaxPoolLayer {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

private:
    int in_n = 0, in_h = 0, in_w = 0, in_c = 0;
    std::vector<Eigen::Index> argmax_;
};

// Affine map on flattened rows: y = xW + b, W is (in, out) row-major.
class DenseLayer {
public:
    DenseLayer(int in_dim, int out_dim);

    void init_weights(Rng& rng);
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

    Param weights, bias;
    int in_dim, out_dim;

private:
    Tensor last_input_;
};

// Row-wise stable softmax of (n, S) logits.
Tensor softmax(const Tensor& logits);

// Mean negative log-score of the true class; scores floored at 1e-12.
double cross_entropy(const Tensor& scores, const std::vector<int>& labels);

// d(loss)/d(logits) for the softmax + cross-entropy composite: (s - 1_y)/n.
Tensor softmax_cross_entropy_backward(const Tensor& scores, const std::vector<int>& labels);

} // namespace docsource
