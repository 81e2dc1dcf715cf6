#pragma once

#include <vector>

#include "docsource/layers.hpp"

namespace docsource {

// First/second moment estimates per parameter block plus the global step
// counter. beta/eps follow the common defaults.
struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long t = 0; // completed updates
    std::vector<Eigen::ArrayXd> m, v;

    explicit AdamState(const std::vector<Param*>& params);
};

// lr_t = lr0 / (1 + decay * t), t = global update count.
double decayed_lr(double lr0, double decay, long t);

// One bias-corrected Adam update over all parameter blocks; increments t.
void adam_step(std::vector<Param*>& params, AdamState& state, double lr_t);

} // namespace docsource
