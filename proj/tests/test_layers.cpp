#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "docsource/adam.hpp"
#include "docsource/layers.hpp"
#include "docsource/network.hpp"
#include "docsource/rng.hpp"

using namespace docsource;

namespace {

void fill_random(Eigen::ArrayXd& a, Rng& rng, double scale = 1.0) {
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = scale * rng.normal();
}

Tensor random_tensor(int n, int h, int w, int c, Rng& rng, double scale = 1.0) {
    Tensor t(n, h, w, c);
    fill_random(t.data, rng, scale);
    return t;
}

// max relative error between analytic and central finite differences of a
// scalar loss with respect to every entry of `target`
double grad_check(Eigen::ArrayXd& target, const Eigen::ArrayXd& analytic,
                  const std::function<double()>& loss, double h = 1e-5,
                  double floor = 1e-8) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < target.size(); ++i) {
        const double keep = target[i];
        target[i] = keep + h;
        const double up = loss();
        target[i] = keep - h;
        const double down = loss();
        target[i] = keep;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), floor});
        worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
    }
    return worst;
}

// weighted-sum loss turns a tensor output into a scalar with known gradient
double weighted_sum(const Tensor& t, const Eigen::ArrayXd& weights) {
    return (t.data * weights).sum();
}

} // namespace

// ---- convolution ----

TEST_CASE("conv with identity kernel reproduces the cropped interior") {
    ConvLayer conv(1, 1);
    conv.weights.value.setZero();
    conv.weights.value[4] = 1.0; // center tap
    conv.bias.value.setZero();
    Rng rng(1);
    const Tensor x = random_tensor(2, 6, 7, 1, rng);
    const Tensor y = conv.forward(x);
    REQUIRE(y.h == 4);
    REQUIRE(y.w == 5);
    for (int b = 0; b < 2; ++b)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 5; ++j)
                CHECK(y.at(b, i, j, 0) == doctest::Approx(x.at(b, i + 1, j + 1, 0)));
}

TEST_CASE("conv of zero input broadcasts the bias") {
    ConvLayer conv(3, 5);
    Rng rng(2);
    fill_random(conv.weights.value, rng);
    for (int f = 0; f < 5; ++f) conv.bias.value[f] = f * 0.5;
    const Tensor x(2, 5, 5, 3);
    const Tensor y = conv.forward(x);
    for (int b = 0; b < 2; ++b)
        for (int i = 0; i < y.h; ++i)
            for (int j = 0; j < y.w; ++j)
                for (int f = 0; f < 5; ++f)
                    CHECK(y.at(b, i, j, f) == doctest::Approx(f * 0.5));
}

TEST_CASE("conv matches a brute-force quadruple loop") {
    Rng rng(3);
    ConvLayer conv(2, 3);
    fill_random(conv.weights.value, rng);
    fill_random(conv.bias.value, rng);
    const Tensor x = random_tensor(1, 6, 6, 2, rng);
    const Tensor y = conv.forward(x);
    for (int oy = 0; oy < 4; ++oy)
        for (int ox = 0; ox < 4; ++ox)
            for (int f = 0; f < 3; ++f) {
                double acc = conv.bias.value[f];
                for (int ky = 0; ky < 3; ++ky)
                    for (int kx = 0; kx < 3; ++kx)
                        for (int c = 0; c < 2; ++c)
                            acc += x.at(0, oy + ky, ox + kx, c) *
                                   conv.weights.value[((ky * 3 + kx) * 2 + c) * 3 + f];
                CHECK(y.at(0, oy, ox, f) == doctest::Approx(acc).epsilon(1e-9));
            }
}

TEST_CASE("conv is linear in its input for zero bias") {
    Rng rng(4);
    ConvLayer conv(1, 2);
    fill_random(conv.weights.value, rng);
    conv.bias.value.setZero();
    Tensor a = random_tensor(1, 5, 5, 1, rng);
    Tensor b = random_tensor(1, 5, 5, 1, rng);
    Tensor ab = a;
    ab.data += b.data;
    const Tensor ya = conv.forward(a), yb = conv.forward(b), yab = conv.forward(ab);
    for (Eigen::Index i = 0; i < yab.data.size(); ++i)
        CHECK(yab.data[i] == doctest::Approx(ya.data[i] + yb.data[i]).epsilon(1e-9));
}

TEST_CASE("conv gradients match finite differences") {
    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        ConvLayer conv(2, 2);
        fill_random(conv.weights.value, rng, 0.5);
        fill_random(conv.bias.value, rng, 0.5);
        Tensor x = random_tensor(2, 5, 5, 2, rng);
        Eigen::ArrayXd lw(Eigen::Index(2) * 3 * 3 * 2);
        fill_random(lw, rng);

        auto loss = [&] { return weighted_sum(conv.forward(x), lw); };

        conv.weights.grad.setZero();
        conv.bias.grad.setZero();
        Tensor dy = conv.forward(x); // establish cache
        dy.data = lw;
        const Tensor dx = conv.backward(dy);

        CHECK(grad_check(x.data, dx.data, loss) < 1e-6);
        CHECK(grad_check(conv.weights.value, conv.weights.grad, loss) < 1e-6);
        CHECK(grad_check(conv.bias.value, conv.bias.grad, loss) < 1e-6);
    }
}

// ---- batch normalization ----

TEST_CASE("batchnorm standardizes per channel in train mode") {
    Rng rng(6);
    BatchNormLayer bn(3);
    Tensor x = random_tensor(4, 3, 3, 3, rng, 2.5);
    x.data += 1.7;
    const Tensor y = bn.forward(x, true);
    for (int c = 0; c < 3; ++c) {
        double mean = 0.0, var = 0.0;
        const int m = 4 * 3 * 3;
        for (int b = 0; b < 4; ++b)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) mean += y.at(b, i, j, c);
        mean /= m;
        for (int b = 0; b < 4; ++b)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const double d = y.at(b, i, j, c) - mean;
                    var += d * d;
                }
        var /= m;
        CHECK(std::abs(mean) < 1e-6);
        CHECK(std::abs(var - 1.0) < 1e-4);
    }
}

TEST_CASE("batchnorm applies gamma and beta after standardization") {
    Rng rng(7);
    BatchNormLayer bn(2);
    bn.gamma.value.setConstant(2.0);
    bn.beta.value.setConstant(3.0);
    Tensor x = random_tensor(8, 2, 2, 2, rng);
    const Tensor y = bn.forward(x, true);
    for (int c = 0; c < 2; ++c) {
        double mean = 0.0, var = 0.0;
        const int m = 8 * 2 * 2;
        for (int b = 0; b < 8; ++b)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) mean += y.at(b, i, j, c);
        mean /= m;
        for (int b = 0; b < 8; ++b)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const double d = y.at(b, i, j, c) - mean;
                    var += d * d;
                }
        var /= m;
        CHECK(mean == doctest::Approx(3.0).epsilon(1e-6));
        CHECK(std::sqrt(var) == doctest::Approx(2.0).epsilon(1e-3));
    }
}

TEST_CASE("batchnorm rejects singleton batches in train mode") {
    BatchNormLayer bn(1);
    Tensor x(1, 2, 2, 1);
    CHECK_THROWS_AS(bn.forward(x, true), DegenerateBatch);
}

TEST_CASE("batchnorm inference uses running statistics only") {
    BatchNormLayer bn(1);
    bn.running_mean[0] = 5.0;
    bn.running_var[0] = 4.0;
    Tensor x(1, 1, 1, 1);
    x.data[0] = 7.0;
    const Tensor y = bn.forward(x, false);
    CHECK(y.data[0] == doctest::Approx((7.0 - 5.0) / std::sqrt(4.0 + 1e-5)));
}

TEST_CASE("batchnorm gradients match finite differences") {
    Rng rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        BatchNormLayer bn(2);
        fill_random(bn.gamma.value, rng, 0.3);
        bn.gamma.value += 1.0;
        fill_random(bn.beta.value, rng, 0.3);
        Tensor x = random_tensor(3, 2, 2, 2, rng);
        Eigen::ArrayXd lw(x.data.size());
        fill_random(lw, rng);

        auto loss = [&] { return weighted_sum(bn.forward(x, true), lw); };

        bn.gamma.grad.setZero();
        bn.beta.grad.setZero();
        BatchNormLayer probe = bn; // keep running stats from drifting the loss
        Tensor dy = bn.forward(x, true);
        dy.data = lw;
        const Tensor dx = bn.backward(dy);

        auto fresh_loss = [&] {
            BatchNormLayer tmp = probe;
            tmp.gamma.value = bn.gamma.value;
            tmp.beta.value = bn.beta.value;
            return weighted_sum(tmp.forward(x, true), lw);
        };
        (void)loss;
        CHECK(grad_check(x.data, dx.data, fresh_loss) < 1e-5);
        CHECK(grad_check(bn.gamma.value, bn.gamma.grad, fresh_loss) < 1e-5);
        CHECK(grad_check(bn.beta.value, bn.beta.grad, fresh_loss) < 1e-5);
    }
}

// ---- relu / maxpool ----

TEST_CASE("relu clamps negatives") {
    ReluLayer relu;
    Tensor x(1, 1, 1, 3);
    x.data << -1.0, 0.0, 2.0;
    const Tensor y = relu.forward(x);
    CHECK(y.data[0] == 0.0);
    CHECK(y.data[1] == 0.0);
    CHECK(y.data[2] == 2.0);
}

TEST_CASE("maxpool of a single window picks the max") {
    MaxPoolLayer pool;
    Tensor x(1, 2, 2, 1);
    x.data << 1.0, 2.0, 3.0, 4.0;
    const Tensor y = pool.forward(x);
    REQUIRE(y.data.size() == 1);
    CHECK(y.data[0] == 4.0);
}

TEST_CASE("maxpool matches a brute-force window scan") {
    Rng rng(9);
    const Tensor x = random_tensor(2, 12, 12, 5, rng);
    MaxPoolLayer pool;
    const Tensor y = pool.forward(x);
    REQUIRE(y.h == 6);
    REQUIRE(y.w == 6);
    for (int b = 0; b < 2; ++b)
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                for (int c = 0; c < 5; ++c) {
                    const double expected =
                        std::max({x.at(b, 2 * i, 2 * j, c), x.at(b, 2 * i, 2 * j + 1, c),
                                  x.at(b, 2 * i + 1, 2 * j, c), x.at(b, 2 * i + 1, 2 * j + 1, c)});
                    CHECK(y.at(b, i, j, c) == expected);
                }
}

TEST_CASE("maxpool drops a trailing odd row/column") {
    Rng rng(10);
    const Tensor x = random_tensor(1, 5, 7, 1, rng);
    MaxPoolLayer pool;
    const Tensor y = pool.forward(x);
    CHECK(y.h == 2);
    CHECK(y.w == 3);
}

TEST_CASE("relu and maxpool gradients match finite differences") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        Tensor x = random_tensor(2, 4, 4, 3, rng);
        Eigen::ArrayXd lw_relu(x.data.size());
        fill_random(lw_relu, rng);
        ReluLayer relu;
        auto relu_loss = [&] { return weighted_sum(relu.forward(x), lw_relu); };
        Tensor dy = relu.forward(x);
        dy.data = lw_relu;
        const Tensor dx = relu.backward(dy);
        CHECK(grad_check(x.data, dx.data, relu_loss) < 1e-6);

        MaxPoolLayer pool;
        Tensor y = pool.forward(x);
        Eigen::ArrayXd lw_pool(y.data.size());
        fill_random(lw_pool, rng);
        auto pool_loss = [&] { return weighted_sum(pool.forward(x), lw_pool); };
        Tensor dyp = y;
        dyp.data = lw_pool;
        const Tensor dxp = pool.backward(dyp);
        CHECK(grad_check(x.data, dxp.data, pool_loss) < 1e-6);
    }
}

// ---- dense ----

TEST_CASE("dense with identity weights is the identity map") {
    DenseLayer fc(3, 3);
    fc.weights.value.setZero();
    for (int i = 0; i < 3; ++i) fc.weights.value[i * 3 + i] = 1.0;
    fc.bias.value.setZero();
    Tensor x(2, 1, 1, 3);
    x.data << 1, 2, 3, 4, 5, 6;
    const Tensor y = fc.forward(x);
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(y.data[i] == doctest::Approx(x.data[i]));
}

TEST_CASE("dense of zero input returns the bias") {
    DenseLayer fc(4, 2);
    Rng rng(12);
    fill_random(fc.weights.value, rng);
    fc.bias.value << 0.5, -1.5;
    Tensor x(3, 1, 1, 4);
    const Tensor y = fc.forward(x);
    for (int b = 0; b < 3; ++b) {
        CHECK(y.at(b, 0, 0, 0) == doctest::Approx(0.5));
        CHECK(y.at(b, 0, 0, 1) == doctest::Approx(-1.5));
    }
}

TEST_CASE("dense gradients match finite differences") {
    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        DenseLayer fc(30, 7);
        fill_random(fc.weights.value, rng, 0.3);
        fill_random(fc.bias.value, rng, 0.3);
        Tensor x = random_tensor(2, 1, 1, 30, rng);
        Eigen::ArrayXd lw(Eigen::Index(2) * 7);
        fill_random(lw, rng);

        auto loss = [&] { return weighted_sum(fc.forward(x), lw); };
        fc.weights.grad.setZero();
        fc.bias.grad.setZero();
        Tensor dy = fc.forward(x);
        dy.data = lw;
        const Tensor dx = fc.backward(dy);

        CHECK(grad_check(x.data, dx.data, loss) < 1e-6);
        CHECK(grad_check(fc.weights.value, fc.weights.grad, loss) < 1e-6);
        CHECK(grad_check(fc.bias.value, fc.bias.grad, loss) < 1e-6);
    }
}

// ---- softmax / cross-entropy ----

TEST_CASE("softmax of a constant vector is uniform") {
    Tensor t(1, 1, 1, 4);
    const Tensor s = softmax(t);
    for (int i = 0; i < 4; ++i) CHECK(s.data[i] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("softmax of [ln 2, 0] is [2/3, 1/3]") {
    Tensor t(1, 1, 1, 2);
    t.data << std::log(2.0), 0.0;
    const Tensor s = softmax(t);
    CHECK(s.data[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(s.data[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("softmax survives extreme logits") {
    Tensor t(1, 1, 1, 2);
    t.data << 1000.0, 0.0;
    const Tensor s = softmax(t);
    CHECK(std::isfinite(s.data[0]));
    CHECK(s.data[0] == doctest::Approx(1.0));
    CHECK(s.data[1] == doctest::Approx(0.0));
}

TEST_CASE("softmax shift invariance, positivity, normalization, argmax") {
    Rng rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        const int S = 2 + int(rng.below(12));
        Tensor t(1, 1, 1, S);
        fill_random(t.data, rng, 3.0);
        const Tensor s = softmax(t);
        Tensor shifted = t;
        shifted.data += rng.uniform(-50.0, 50.0);
        const Tensor s2 = softmax(shifted);
        double sum = 0.0;
        Eigen::Index argmax_logit, argmax_score;
        t.data.maxCoeff(&argmax_logit);
        s.data.maxCoeff(&argmax_score);
        CHECK(argmax_logit == argmax_score);
        for (int i = 0; i < S; ++i) {
            CHECK(s.data[i] > 0.0);
            CHECK(std::abs(s.data[i] - s2.data[i]) < 1e-12);
            sum += s.data[i];
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("cross-entropy of a perfect and a uniform prediction") {
    Tensor s(1, 1, 1, 4);
    s.data << 1.0, 0.0, 0.0, 0.0;
    CHECK(cross_entropy(s, {0}) == doctest::Approx(0.0));
    s.data << 0.25, 0.25, 0.25, 0.25;
    CHECK(cross_entropy(s, {2}) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("cross-entropy equals a direct evaluation loop") {
    Rng rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + int(rng.below(8)), S = 2 + int(rng.below(6));
        Tensor logits(n, 1, 1, S);
        fill_random(logits.data, rng, 2.0);
        const Tensor s = softmax(logits);
        std::vector<int> labels;
        for (int i = 0; i < n; ++i) labels.push_back(int(rng.below(std::uint64_t(S))));
        double direct = 0.0;
        for (int i = 0; i < n; ++i) direct += -std::log(s.at(i, 0, 0, labels[std::size_t(i)]));
        direct /= n;
        CHECK(cross_entropy(s, labels) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("softmax + cross-entropy composite gradient matches finite differences") {
    Rng rng(16);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 3, S = 5;
        Tensor logits(n, 1, 1, S);
        fill_random(logits.data, rng, 2.0);
        std::vector<int> labels;
        for (int i = 0; i < n; ++i) labels.push_back(int(rng.below(S)));

        auto loss = [&] { return cross_entropy(softmax(logits), labels); };
        const Tensor d = softmax_cross_entropy_backward(softmax(logits), labels);
        CHECK(grad_check(logits.data, d.data, loss) < 1e-6);
    }
}

// ---- adam ----

TEST_CASE("adam first step moves every parameter by about the learning rate") {
    Param p;
    p.init("w", {4});
    p.value << 1.0, -2.0, 3.0, 0.5;
    p.grad << 0.7, -0.1, 2.0, -3.0;
    const Eigen::ArrayXd before = p.value;
    std::vector<Param*> params = {&p};
    AdamState state(params);
    adam_step(params, state, 0.001);
    CHECK(state.t == 1);
    // with bias correction the first update is lr * g/(|g| + eps')
    for (int i = 0; i < 4; ++i) {
        const double step = p.value[i] - before[i];
        CHECK(std::abs(step) == doctest::Approx(0.001).epsilon(1e-4));
        CHECK(step * p.grad[i] < 0.0); // descent direction
    }
}

TEST_CASE("adam with zero gradients leaves parameters untouched") {
    Param p;
    p.init("w", {3});
    p.value << 1.0, 2.0, 3.0;
    std::vector<Param*> params = {&p};
    AdamState state(params);
    adam_step(params, state, 0.001);
    CHECK(p.value[0] == 1.0);
    CHECK(p.value[1] == 2.0);
    CHECK(p.value[2] == 3.0);
}

TEST_CASE("adam matches a scalar reference implementation over many steps") {
    Param p;
    p.init("w", {1});
    p.value[0] = 0.3;
    std::vector<Param*> params = {&p};
    AdamState state(params);
    double m = 0.0, v = 0.0, ref = 0.3;
    Rng rng(19);
    for (int t = 1; t <= 25; ++t) {
        const double g = rng.normal();
        p.grad[0] = g;
        const double lr = decayed_lr(0.001, 0.0005, t - 1);
        adam_step(params, state, lr);
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double mhat = m / (1.0 - std::pow(0.9, t));
        const double vhat = v / (1.0 - std::pow(0.999, t));
        ref -= lr * mhat / (std::sqrt(vhat) + 1e-8);
        CHECK(p.value[0] == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("learning-rate schedule examples") {
    CHECK(decayed_lr(0.001, 0.0005, 0) == doctest::Approx(0.001));
    CHECK(decayed_lr(0.001, 0.0005, 2000) == doctest::Approx(0.0005));
    CHECK(decayed_lr(0.001, 0.0005, 1) == doctest::Approx(0.001 / 1.0005));
    CHECK(decayed_lr(0.01, 0.0, 500) == doctest::Approx(0.01));
}

// ---- network-level ----

TEST_CASE("network forward yields normalized scores of the right size") {
    NetworkConfig cfg;
    cfg.patch_size = 18;
    cfg.class_count = 8;
    cfg.seed = 99;
    Network net = build_network(cfg);
    Rng rng(17);
    Tensor x = random_tensor(3, 18, 18, 1, rng, 0.3);
    const Tensor s = net.forward(x, false);
    REQUIRE(s.n == 3);
    REQUIRE(s.c == 8);
    for (int b = 0; b < 3; ++b) {
        double sum = 0.0;
        for (int c = 0; c < 8; ++c) sum += s.at(b, 0, 0, c);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("too-small patch sizes are rejected") {
    NetworkConfig cfg;
    cfg.patch_size = 7;
    cfg.class_count = 2;
    CHECK_THROWS_AS(build_network(cfg), BadConfig);
}

TEST_CASE("building twice with one seed gives identical parameters") {
    NetworkConfig cfg;
    cfg.patch_size = 18;
    cfg.class_count = 8;
    cfg.seed = 4242;
    Network a = build_network(cfg), b = build_network(cfg);
    const auto pa = a.params(), pb = b.params();
    for (std::size_t i = 0; i < pa.size(); ++i)
        CHECK((pa[i]->value == pb[i]->value).all());
}

TEST_CASE("parameter count follows the layer-by-layer formula") {
    // conv1 500 + conv2/conv3 22550 each + 3 BN x 100 + fc1 (1800*256+256)
    // + fc2 (256*S + S) = 506,956 + 257*S
    for (int S : {2, 8, 11, 21}) {
        NetworkConfig cfg;
        cfg.patch_size = 18;
        cfg.class_count = S;
        const Network net(cfg);
        CHECK(net.param_count(true) == 506956 + 257L * S);
        CHECK(net.param_count(false) == 506956 + 257L * S + 300);
    }
    NetworkConfig cfg;
    cfg.patch_size = 18;
    cfg.class_count = 8;
    CHECK(Network(cfg).param_count(true) == 509012);
    cfg.class_count = 21;
    CHECK(Network(cfg).param_count(true) == 512353);
}

TEST_CASE("whole-network gradient check on a tiny config") {
    NetworkConfig cfg;
    cfg.patch_size = 8;
    cfg.class_count = 3;
    cfg.conv_filters = 4;
    cfg.dense_units = 6;
    cfg.seed = 7;
    Network net = build_network(cfg);
    Rng rng(18);
    Tensor x = random_tensor(3, 8, 8, 1, rng, 0.5);
    std::vector<int> labels = {0, 2, 1};

    net.zero_grads();
    const Tensor scores = net.forward(x, true);
    net.backward(scores, labels);

    for (Param* p : net.params()) {
        // keep running-stat drift out of the numeric loss
        Network probe = net;
        auto loss = [&] {
            Network tmp = probe;
            return cross_entropy(tmp.forward(x, true), labels);
        };
        Eigen::ArrayXd analytic = p->grad;
        // point the probe at the same parameter block
        std::size_t idx = 0;
        const auto ps = net.params();
        for (std::size_t i = 0; i < ps.size(); ++i)
            if (ps[i] == p) idx = i;
        // central differences on a loss of magnitude ~1 resolve ~1e-11, so a
        // tiny true gradient needs a larger relative-error floor
        const double worst = grad_check(probe.params()[idx]->value, analytic, loss, 1e-5, 1e-6);
        CHECK(worst < 1e-4);
    }
}
