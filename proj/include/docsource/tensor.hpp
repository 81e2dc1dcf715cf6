#pragma once

#include <Eigen/Dense>

#include "docsource/errors.hpp"

namespace docsource {

// Dense value block, channel-last layout (batch, height, width, channels).
// 2-d data (batch, features) uses h = w = 1 implicitly via the flat view.
struct Tensor {
    int n = 0, h = 0, w = 0, c = 0;
    Eigen::ArrayXd data;

    Tensor() = default;
    Tensor(int n_, int h_, int w_, int c_)
        : n(n_), h(h_), w(w_), c(c_), data(Eigen::ArrayXd::Zero(Eigen::Index(n_) * h_ * w_ * c_)) {}

    Eigen::Index size() const { return data.size(); }

    double& at(int b, int y, int x, int ch) {
        return data[((Eigen::Index(b) * h + y) * w + x) * c + ch];
    }
    double at(int b, int y, int x, int ch) const {
        return data[((Eigen::Index(b) * h + y) * w + x) * c + ch];
    }

    // flat row-major matrix view: n rows, h*w*c columns
    auto rows() {
        return Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            data.data(), n, Eigen::Index(h) * w * c);
    }
    auto rows() const {
        return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            data.data(), n, Eigen::Index(h) * w * c);
    }
};

} // namespace docsource
