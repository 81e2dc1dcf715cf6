#include "docsource/layers.hpp"

#include <cmath>
#include <cstring>
#include <limits>

namespace docsource {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMat>;
using ConstRowMap = Eigen::Map<const RowMat>;

// ---- ConvLayer ----

ConvLayer::ConvLayer(int in_c_, int out_c_, int k_) : in_c(in_c_), out_c(out_c_), k(k_) {
    weights.init("conv_w", {k, k, in_c, out_c});
    bias.init("conv_b", {out_c});
}

void ConvLayer::init_weights(Rng& rng) {
    const double fan_in = double(k) * k * in_c;
    const double std_dev = std::sqrt(2.0 / fan_in);
    for (Eigen::Index i = 0; i < weights.value.size(); ++i)
        weights.value[i] = rng.normal(0.0, std_dev);
    bias.value.setZero();
}

Tensor ConvLayer::forward(const Tensor& x) {
    if (x.c != in_c || x.h < k || x.w < k)
        throw ShapeMismatch("conv input shape does not match kernel");
    const int oh = x.h - k + 1, ow = x.w - k + 1;
    const Eigen::Index positions = Eigen::Index(x.n) * oh * ow;
    const Eigen::Index patch_len = Eigen::Index(k) * k * in_c;

    cols_.resize(positions, patch_len);
    Eigen::Index row = 0;
    for (int b = 0; b < x.n; ++b) {
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox, ++row) {
                double* dst = cols_.data() + row * patch_len;
                for (int ky = 0; ky < k; ++ky) {
                    const double* src = &x.data[((Eigen::Index(b) * x.h + oy + ky) * x.w + ox) * in_c];
                    std::memcpy(dst + Eigen::Index(ky) * k * in_c, src,
                                std::size_t(k) * in_c * sizeof(double));
                }
            }
        }
    }

    Tensor y(x.n, oh, ow, out_c);
    ConstRowMap kmat(weights.value.data(), patch_len, out_c);
    RowMap ymat(y.data.data(), positions, out_c);
    ymat.noalias() = cols_ * kmat;
    ymat.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.value.data(), out_c);
    last_input_ = x;
    return y;
}

Tensor ConvLayer::backward(const Tensor& dy) {
    const Tensor& x = last_input_;
    const int oh = x.h - k + 1, ow = x.w - k + 1;
    if (dy.n != x.n || dy.h != oh || dy.w != ow || dy.c != out_c)
        throw ShapeMismatch("conv backward shape mismatch");
    const Eigen::Index positions = Eigen::Index(x.n) * oh * ow;
    const Eigen::Index patch_len = Eigen::Index(k) * k * in_c;

    ConstRowMap dymat(dy.data.data(), positions, out_c);
    RowMap dwmat(weights.grad.data(), patch_len, out_c);
    dwmat.noalias() += cols_.transpose() * dymat;
    Eigen::Map<Eigen::RowVectorXd>(bias.grad.data(), out_c) += dymat.colwise().sum();

    // dx by scattering dcols back to input positions
    ConstRowMap kmat(weights.value.data(), patch_len, out_c);
    RowMat dcols = dymat * kmat.transpose();
    Tensor dx(x.n, x.h, x.w, x.c);
    Eigen::Index row = 0;
    for (int b = 0; b < x.n; ++b) {
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox, ++row) {
                const double* src = dcols.data() + row * patch_len;
                for (int ky = 0; ky < k; ++ky) {
                    double* dst = &dx.data[((Eigen::Index(b) * x.h + oy + ky) * x.w + ox) * in_c];
                    const double* s = src + Eigen::Index(ky) * k * in_c;
                    for (Eigen::Index i = 0; i < Eigen::Index(k) * in_c; ++i) dst[i] += s[i];
                }
            }
        }
    }
    return dx;
}

// ---- BatchNormLayer ----

BatchNormLayer::BatchNormLayer(int channels_, double momentum_)
    : channels(channels_), momentum(momentum_) {
    gamma.init("bn_gamma", {channels});
    beta.init("bn_beta", {channels});
    gamma.value.setOnes();
    running_mean = Eigen::ArrayXd::Zero(channels);
    running_var = Eigen::ArrayXd::Ones(channels);
}

Tensor BatchNormLayer::forward(const Tensor& x, bool train) {
    if (x.c != channels) throw ShapeMismatch("batchnorm channel mismatch");
    const Eigen::Index m = Eigen::Index(x.n) * x.h * x.w; // samples per channel
    Tensor y(x.n, x.h, x.w, x.c);

    Eigen::ArrayXd mean(channels), var(channels);
    if (train) {
        if (x.n < 2) throw DegenerateBatch("batchnorm train mode needs batch >= 2");
        mean.setZero();
        var.setZero();
        for (Eigen::Index i = 0; i < x.data.size(); i += channels)
            for (int ch = 0; ch < channels; ++ch) mean[ch] += x.data[i + ch];
        mean /= double(m);
        for (Eigen::Index i = 0; i < x.data.size(); i += channels)
            for (int ch = 0; ch < channels; ++ch) {
                const double d = x.data[i + ch] - mean[ch];
                var[ch] += d * d;
            }
        var /= double(m);
        running_mean = momentum * running_mean + (1.0 - momentum) * mean;
        running_var = momentum * running_var + (1.0 - momentum) * var;
    } else {
        mean = running_mean;
        var = running_var;
    }

    inv_std_ = (var + kEps).sqrt().inverse();
    xhat_ = Tensor(x.n, x.h, x.w, x.c);
    for (Eigen::Index i = 0; i < x.data.size(); i += channels)
        for (int ch = 0; ch < channels; ++ch) {
            const double xh = (x.data[i + ch] - mean[ch]) * inv_std_[ch];
            xhat_.data[i + ch] = xh;
            y.data[i + ch] = gamma.value[ch] * xh + beta.value[ch];
        }
    rows_per_channel_ = m;
    return y;
}

Tensor BatchNormLayer::backward(const Tensor& dy) {
    const double m = double(rows_per_channel_);
    Eigen::ArrayXd sum_dy = Eigen::ArrayXd::Zero(channels);
    Eigen::ArrayXd sum_dy_xhat = Eigen::ArrayXd::Zero(channels);
    for (Eigen::Index i = 0; i < dy.data.size(); i += channels)
        for (int ch = 0; ch < channels; ++ch) {
            sum_dy[ch] += dy.data[i + ch];
            sum_dy_xhat[ch] += dy.data[i + ch] * xhat_.data[i + ch];
        }
    gamma.grad += sum_dy_xhat;
    beta.grad += sum_dy;

    Tensor dx(dy.n, dy.h, dy.w, dy.c);
    for (Eigen::Index i = 0; i < dy.data.size(); i += channels)
        for (int ch = 0; ch < channels; ++ch) {
            const double t = m * dy.data[i + ch] - sum_dy[ch] -
                             xhat_.data[i + ch] * sum_dy_xhat[ch];
            dx.data[i + ch] = gamma.value[ch] * inv_std_[ch] * t / m;
        }
    return dx;
}

// ---- ReluLayer ----

Tensor ReluLayer::forward(const Tensor& x) {
    last_input_ = x;
    Tensor y = x;
    y.data = y.data.max(0.0);
    return y;
}

Tensor ReluLayer::backward(const Tensor& dy) const {
    Tensor dx = dy;
    for (Eigen::Index i = 0; i < dx.data.size(); ++i)
        if (last_input_.data[i] <= 0.0) dx.data[i] = 0.0;
    return dx;
}

// ---- MaxPoolLayer ----

Tensor MaxPoolLayer::forward(const Tensor& x) {
    in_n = x.n; in_h = x.h; in_w = x.w; in_c = x.c;
    const int oh = x.h / 2, ow = x.w / 2;
    Tensor y(x.n, oh, ow, x.c);
    argmax_.assign(y.data.size(), 0);
    for (int b = 0; b < x.n; ++b)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox)
                for (int ch = 0; ch < x.c; ++ch) {
                    double best = -std::numeric_limits<double>::infinity();
                    Eigen::Index best_idx = 0;
                    for (int wy = 0; wy < 2; ++wy)
                        for (int wx = 0; wx < 2; ++wx) {
                            const Eigen::Index idx =
                                ((Eigen::Index(b) * x.h + 2 * oy + wy) * x.w + 2 * ox + wx) * x.c + ch;
                            if (x.data[idx] > best) { // strict: first-index tie-break
                                best = x.data[idx];
                                best_idx = idx;
                            }
                        }
                    const Eigen::Index out_idx =
                        ((Eigen::Index(b) * oh + oy) * ow + ox) * x.c + ch;
                    y.data[out_idx] = best;
                    argmax_[out_idx] = best_idx;
                }
    return y;
}

Tensor MaxPoolLayer::backward(const Tensor& dy) const {
    Tensor dx(in_n, in_h, in_w, in_c);
    for (Eigen::Index i = 0; i < dy.data.size(); ++i) dx.data[argmax_[i]] += dy.data[i];
    return dx;
}

// ---- DenseLayer ----

DenseLayer::DenseLayer(int in_dim_, int out_dim_) : in_dim(in_dim_), out_dim(out_dim_) {
    weights.init("dense_w", {in_dim, out_dim});
    bias.init("dense_b", {out_dim});
}

void DenseLayer::init_weights(Rng& rng) {
    const double std_dev = std::sqrt(2.0 / double(in_dim));
    for (Eigen::Index i = 0; i < weights.value.size(); ++i)
        weights.value[i] = rng.normal(0.0, std_dev);
    bias.value.setZero();
}

Tensor DenseLayer::forward(const Tensor& x) {
    if (Eigen::Index(x.h) * x.w * x.c != in_dim)
        throw ShapeMismatch("dense input width mismatch");
    last_input_ = x;
    Tensor y(x.n, 1, 1, out_dim);
    ConstRowMap wmat(weights.value.data(), in_dim, out_dim);
    y.rows().noalias() = x.rows() * wmat;
    y.rows().rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.value.data(), out_dim);
    return y;
}

Tensor DenseLayer::backward(const Tensor& dy) {
    const Tensor& x = last_input_;
    ConstRowMap wmat(weights.value.data(), in_dim, out_dim);
    RowMap dwmat(weights.grad.data(), in_dim, out_dim);
    dwmat.noalias() += x.rows().transpose() * dy.rows();
    Eigen::Map<Eigen::RowVectorXd>(bias.grad.data(), out_dim) += dy.rows().colwise().sum();
    Tensor dx(x.n, x.h, x.w, x.c);
    dx.rows().noalias() = dy.rows() * wmat.transpose();
    return dx;
}

// ---- softmax / cross-entropy ----

Tensor softmax(const Tensor& logits) {
    Tensor s = logits;
    auto rows = s.rows();
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        const double mx = rows.row(r).maxCoeff();
        rows.row(r) = (rows.row(r).array() - mx).exp();
        rows.row(r) /= rows.row(r).sum();
    }
    return s;
}

double cross_entropy(const Tensor& scores, const std::vector<int>& labels) {
    const auto rows = scores.rows();
    double total = 0.0;
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        const double s = std::max(rows(r, labels[std::size_t(r)]), 1e-12);
        total += -std::log(s);
    }
    return total / double(rows.rows());
}

Tensor softmax_cross_entropy_backward(const Tensor& scores, const std::vector<int>& labels) {
    Tensor d = scores;
    auto rows = d.rows();
    const double inv_n = 1.0 / double(rows.rows());
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        rows(r, labels[std::size_t(r)]) -= 1.0;
        rows.row(r) *= inv_n;
    }
    return d;
}

} // namespace docsource
