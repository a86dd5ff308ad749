#include "billocr/cnn/optimizer.hpp"

#include <cmath>

#include "billocr/cnn/tensor.hpp"

namespace billocr::cnn {

void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads)
{
    if (params.size() != grads.size())
        throw ShapeMismatch("adam_step: parameter and gradient group counts differ");
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.emplace_back(p.size(), 0.0);
            state.v.emplace_back(p.size(), 0.0);
        }
    }
    if (state.m.size() != params.size())
        throw ShapeMismatch("adam_step: optimizer state was built for a different model");
    for (std::size_t g = 0; g < params.size(); ++g)
        if (params[g].size() != grads[g].size() || params[g].size() != state.m[g].size())
            throw ShapeMismatch("adam_step: group " + std::to_string(g) + " size mismatch");

    ++state.t;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t g = 0; g < params.size(); ++g) {
        auto& m = state.m[g];
        auto& v = state.v[g];
        for (std::size_t i = 0; i < params[g].size(); ++i) {
            const double gi = grads[g][i];
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * gi;
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * gi * gi;
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            params[g][i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

}  // namespace billocr::cnn
