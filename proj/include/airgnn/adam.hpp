#pragma once

#include <vector>

#include "airgnn/matrix.hpp"

namespace airgnn::diffmath {

/// Adam optimizer state; accumulator shapes mirror the parameter list.
struct AdamState {
    std::vector<Matrix> m;  // first moments
    std::vector<Matrix> v;  // second moments
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_params(const std::vector<Matrix*>& params);
};

/// Standard Adam update with bias correction, applied in place.
void adam_step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads,
               AdamState& state, double lr);

}  // namespace airgnn::diffmath
