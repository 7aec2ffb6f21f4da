#include "airgnn/mlp.hpp"

#include <cmath>

namespace airgnn::diffmath {

int MlpParams::param_count() const {
    int n = 0;
    for (size_t l = 0; l + 1 < dims.size(); ++l) n += dims[l] * dims[l + 1] + dims[l + 1];
    return n;
}

MlpParams MlpParams::zeros(std::vector<int> dims, OutputActivation act) {
    if (dims.size() < 2) throw std::invalid_argument("mlp: need at least two layer widths");
    MlpParams p;
    p.dims = std::move(dims);
    p.output_activation = act;
    for (size_t l = 0; l + 1 < p.dims.size(); ++l) {
        p.weights.emplace_back(p.dims[l], p.dims[l + 1]);
        p.biases.emplace_back(1, p.dims[l + 1]);
    }
    return p;
}

MlpParams MlpParams::glorot(std::vector<int> dims, OutputActivation act, Rng& rng) {
    MlpParams p = zeros(std::move(dims), act);
    for (size_t l = 0; l < p.weights.size(); ++l) {
        const double bound = std::sqrt(6.0 / (p.dims[l] + p.dims[l + 1]));
        for (double& w : p.weights[l].data) w = rng.uniform(-bound, bound);
    }
    return p;
}

Matrix mlp_eval(const MlpParams& p, const Matrix& x) {
    if (x.cols != p.dims.front())
        throw std::invalid_argument("mlp_eval: input width does not match first layer");
    Matrix h = x;
    const int L = p.layer_count();
    for (int l = 0; l < L; ++l) {
        Matrix z = matmul(h, p.weights[l]);
        for (int i = 0; i < z.rows; ++i)
            for (int j = 0; j < z.cols; ++j) z(i, j) += p.biases[l](0, j);
        if (l + 1 < L) {
            for (double& v : z.data) v = v > 0.0 ? v : 0.0;
        } else if (p.output_activation == OutputActivation::sigmoid) {
            for (double& v : z.data) v = 1.0 / (1.0 + std::exp(-v));
        }
        h = std::move(z);
    }
    return h;
}

MlpVars register_mlp(Tape& tape, const MlpParams& p) {
    MlpVars m;
    m.output_activation = p.output_activation;
    m.dims = p.dims;
    for (size_t l = 0; l < p.weights.size(); ++l) {
        m.weights.push_back(tape.input(p.weights[l]));
        m.biases.push_back(tape.input(p.biases[l]));
    }
    return m;
}

Tape::Var mlp_apply(Tape& tape, const MlpVars& m, Tape::Var x) {
    if (tape.value(x).cols != m.dims.front())
        throw std::invalid_argument("mlp_apply: input width does not match first layer");
    Tape::Var h = x;
    const size_t L = m.weights.size();
    for (size_t l = 0; l < L; ++l) {
        Tape::Var z = tape.add(tape.matmul(h, m.weights[l]), m.biases[l]);
        if (l + 1 < L)
            h = tape.relu(z);
        else if (m.output_activation == OutputActivation::sigmoid)
            h = tape.sigmoid(z);
        else
            h = z;
    }
    return h;
}

}  // namespace airgnn::diffmath
