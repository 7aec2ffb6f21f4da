#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "airgnn/adam.hpp"
#include "airgnn/mlp.hpp"
#include "airgnn/tape.hpp"

using namespace airgnn;
using diffmath::MlpParams;
using diffmath::OutputActivation;
using diffmath::Tape;

TEST_CASE("zero MLP maps any input to zero") {
    const MlpParams p = MlpParams::zeros({4, 8, 3}, OutputActivation::linear);
    Matrix x(2, 4);
    x(0, 1) = 3.5;
    x(1, 3) = -2.0;
    const Matrix y = diffmath::mlp_eval(p, x);
    REQUIRE(y.rows == 2);
    REQUIRE(y.cols == 3);
    for (double v : y.data) CHECK(v == 0.0);
}

TEST_CASE("1->1 identity layer with sigmoid head gives 0.5 at zero") {
    MlpParams p = MlpParams::zeros({1, 1}, OutputActivation::sigmoid);
    p.weights[0](0, 0) = 1.0;
    const Matrix y = diffmath::mlp_eval(p, Matrix(1, 1, 0.0));
    CHECK(y(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sigmoid outputs stay inside (0,1)") {
    Rng rng(3);
    const MlpParams p = diffmath::MlpParams::glorot({5, 16, 1}, OutputActivation::sigmoid, rng);
    Matrix x(20, 5);
    for (double& v : x.data) v = 50.0 * (rng.uniform() - 0.5);
    const Matrix y = diffmath::mlp_eval(p, x);
    for (double v : y.data) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("MLP parameter counts match the layer structure") {
    CHECK(MlpParams::zeros({10, 32, 32}, OutputActivation::linear).param_count() == 1408);
    CHECK(MlpParams::zeros({41, 16, 8}, OutputActivation::linear).param_count() == 808);
    CHECK(MlpParams::zeros({8, 16, 1}, OutputActivation::sigmoid).param_count() == 161);
    // the three-MLP bundle of the message/update/output structure above
    CHECK(1408 + 808 + 161 == 2377);
}

TEST_CASE("dimension mismatch is rejected") {
    const MlpParams p = MlpParams::zeros({4, 2}, OutputActivation::linear);
    CHECK_THROWS(diffmath::mlp_eval(p, Matrix(1, 3)));
}

TEST_CASE("d sigmoid(0) / dx = 0.25") {
    Tape tape;
    const Tape::Var x = tape.input(Matrix(1, 1, 0.0));
    const Tape::Var loss = tape.sigmoid(x);
    tape.backward(loss);
    CHECK(tape.grad(x)(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("gradient of sum of squares is 2W") {
    Rng rng(11);
    Matrix w(3, 4);
    for (double& v : w.data) v = rng.gaussian();
    Tape tape;
    const Tape::Var W = tape.input(w);
    tape.backward(tape.sum(tape.mul(W, W)));
    const Matrix g = tape.grad(W);
    for (size_t i = 0; i < w.data.size(); ++i)
        CHECK(g.data[i] == doctest::Approx(2.0 * w.data[i]).epsilon(1e-14));
}

TEST_CASE("non-scalar loss and double backward are usage errors") {
    Tape tape;
    const Tape::Var x = tape.input(Matrix(2, 2, 1.0));
    CHECK_THROWS(tape.backward(x));
    const Tape::Var s = tape.sum(x);
    tape.backward(s);
    CHECK_THROWS(tape.backward(s));
}

namespace {

// central finite differences of loss(x) -> scalar over every entry of x
template <typename LossFn>
Matrix fd_grad(Matrix x, LossFn loss, double h = 1e-5) {
    Matrix g(x.rows, x.cols);
    for (size_t i = 0; i < x.data.size(); ++i) {
        const double orig = x.data[i];
        x.data[i] = orig + h;
        const double up = loss(x);
        x.data[i] = orig - h;
        const double dn = loss(x);
        x.data[i] = orig;
        g.data[i] = (up - dn) / (2.0 * h);
    }
    return g;
}

double rel_err(const Matrix& a, const Matrix& b) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        num += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
        den += b.data[i] * b.data[i];
    }
    return std::sqrt(num) / std::max(1e-30, std::sqrt(den));
}

}  // namespace

TEST_CASE("random MLP gradient matches central finite differences") {
    Rng rng(7);
    MlpParams p = diffmath::MlpParams::glorot({6, 12, 5, 1}, OutputActivation::sigmoid, rng);
    Matrix x(3, 6);
    for (double& v : x.data) v = rng.gaussian();

    Tape tape;
    const diffmath::MlpVars vars = diffmath::register_mlp(tape, p);
    tape.backward(tape.sum(diffmath::mlp_apply(tape, vars, tape.constant(x))));

    for (int l = 0; l < p.layer_count(); ++l) {
        auto loss_w = [&](const Matrix& w) {
            MlpParams q = p;
            q.weights[static_cast<size_t>(l)] = w;
            Matrix y = diffmath::mlp_eval(q, x);
            double s = 0.0;
            for (double v : y.data) s += v;
            return s;
        };
        const Matrix fd = fd_grad(p.weights[static_cast<size_t>(l)], loss_w);
        CHECK(rel_err(tape.grad(vars.weights[static_cast<size_t>(l)]), fd) < 1e-5);

        auto loss_b = [&](const Matrix& b) {
            MlpParams q = p;
            q.biases[static_cast<size_t>(l)] = b;
            Matrix y = diffmath::mlp_eval(q, x);
            double s = 0.0;
            for (double v : y.data) s += v;
            return s;
        };
        const Matrix fdb = fd_grad(p.biases[static_cast<size_t>(l)], loss_b);
        CHECK(rel_err(tape.grad(vars.biases[static_cast<size_t>(l)]), fdb) < 1e-5);
    }
}

TEST_CASE("composite op gradients match finite differences") {
    Rng rng(23);
    Matrix x0(4, 3);
    for (double& v : x0.data) v = 0.5 + rng.uniform();
    auto loss = [](const Matrix& xm) {
        // mean(log(x) * x) + sum over relu(x - 1) evaluated without a tape
        double acc = 0.0, acc2 = 0.0;
        for (double v : xm.data) {
            acc += std::log(v) * v;
            acc2 += std::max(0.0, v - 1.0);
        }
        return acc / static_cast<double>(xm.data.size()) + acc2;
    };
    Tape tape;
    const Tape::Var x = tape.input(x0);
    const Tape::Var a = tape.mean(tape.mul(tape.log(x), x));
    const Tape::Var b = tape.sum(tape.relu(tape.add_scalar(x, -1.0)));
    tape.backward(tape.add(a, b));
    CHECK(rel_err(tape.grad(x), fd_grad(x0, loss)) < 1e-5);
}

TEST_CASE("forward values and gradients are deterministic") {
    auto run = [] {
        Rng rng(99);
        MlpParams p = diffmath::MlpParams::glorot({4, 8, 1}, OutputActivation::sigmoid, rng);
        Matrix x(2, 4);
        for (double& v : x.data) v = rng.gaussian();
        Tape tape;
        const diffmath::MlpVars vars = diffmath::register_mlp(tape, p);
        const Tape::Var y = tape.sum(diffmath::mlp_apply(tape, vars, tape.constant(x)));
        tape.backward(y);
        std::vector<double> out{tape.value(y)(0, 0)};
        for (const auto& wv : vars.weights)
            for (double g : tape.grad(wv).data) out.push_back(g);
        return out;
    };
    CHECK(run() == run());
}

TEST_CASE("Adam: zero gradient leaves parameters unchanged") {
    Matrix w(2, 2, 1.5);
    std::vector<Matrix*> params{&w};
    diffmath::AdamState st = diffmath::AdamState::for_params(params);
    diffmath::adam_step(params, {Matrix(2, 2, 0.0)}, st, 0.002);
    for (double v : w.data) CHECK(v == 1.5);
    CHECK(st.step == 1);
}

TEST_CASE("Adam: first-step magnitude is approximately lr") {
    for (double g : {1e-6, 1.0, 1e6}) {
        Matrix w(1, 1, 0.0);
        std::vector<Matrix*> params{&w};
        diffmath::AdamState st = diffmath::AdamState::for_params(params);
        diffmath::adam_step(params, {Matrix(1, 1, g)}, st, 0.002);
        CHECK(std::abs(w(0, 0)) == doctest::Approx(0.002).epsilon(1e-2));
        CHECK(w(0, 0) < 0.0);  // opposite the gradient sign
    }
}

TEST_CASE("Adam: constant gradient moves monotonically against its sign") {
    Matrix w(1, 1, 0.0);
    std::vector<Matrix*> params{&w};
    diffmath::AdamState st = diffmath::AdamState::for_params(params);
    double prev = 0.0;
    for (int i = 0; i < 5; ++i) {
        diffmath::adam_step(params, {Matrix(1, 1, 3.0)}, st, 0.01);
        CHECK(w(0, 0) < prev);
        prev = w(0, 0);
    }
}
