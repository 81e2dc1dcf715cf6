#include "docsource/adam.hpp"

#include <cmath>

namespace docsource {

AdamState::AdamState(const std::vector<Param*>& params) {
    m.reserve(params.size());
    v.reserve(params.size());
    for (const Param* p : params) {
        m.push_back(Eigen::ArrayXd::Zero(p->value.size()));
        v.push_back(Eigen::ArrayXd::Zero(p->value.size()));
    }
}

double decayed_lr(double lr0, double decay, long t) {
    return lr0 / (1.0 + decay * double(t));
}

void adam_step(std::vector<Param*>& params, AdamState& state, double lr_t) {
    ++state.t;
    const double bc1 = 1.0 - std::pow(state.beta1, double(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, double(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Param& p = *params[i];
        if (p.grad.size() != state.m[i].size())
            throw ShapeMismatch("adam state/parameter shape mismatch");
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * p.grad;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * p.grad.square();
        p.value -= lr_t * (state.m[i] / bc1) / ((state.v[i] / bc2).sqrt() + state.eps);
    }
}

} // namespace docsource
