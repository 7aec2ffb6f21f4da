#pragma once

#include <string>
#include <vector>

#include "airgnn/matrix.hpp"
#include "airgnn/rng.hpp"
#include "airgnn/tape.hpp"

namespace airgnn::diffmath {

enum class OutputActivation { linear, sigmoid };

/// One multilayer perceptron: ReLU hidden layers, configurable output head.
struct MlpParams {
    std::vector<int> dims;         // layer widths, input first
    std::vector<Matrix> weights;   // dims[l] x dims[l+1]
    std::vector<Matrix> biases;    // 1 x dims[l+1]
    OutputActivation output_activation = OutputActivation::linear;

    int layer_count() const { return static_cast<int>(dims.size()) - 1; }
    int param_count() const;

    static MlpParams zeros(std::vector<int> dims, OutputActivation act);
    // Glorot-uniform weights, zero biases
    static MlpParams glorot(std::vector<int> dims, OutputActivation act, Rng& rng);
};

/// Forward pass without a tape; batch rows over the leading dimension.
Matrix mlp_eval(const MlpParams& p, const Matrix& x);

/// Parameter handles of one MLP registered on a tape.
struct MlpVars {
    std::vector<Tape::Var> weights;
    std::vector<Tape::Var> biases;
    OutputActivation output_activation = OutputActivation::linear;
    std::vector<int> dims;
};

MlpVars register_mlp(Tape& tape, const MlpParams& p);
Tape::Var mlp_apply(Tape& tape, const MlpVars& m, Tape::Var x);

}  // namespace airgnn::diffmath
