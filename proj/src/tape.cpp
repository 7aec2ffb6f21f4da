#include "airgnn/tape.hpp"

#include <cmath>
#include <numeric>
#include <utility>

namespace airgnn::diffmath {

void Tape::check_finite(const Matrix& m, const char* op) {
    for (double x : m.data)
        if (!std::isfinite(x))
            throw std::runtime_error(std::string("tape: non-finite value produced by ") + op);
}

Tape::Var Tape::push(Matrix v, bool requires_grad, std::function<void()> backprop) {
    Node n;
    n.value = std::move(v);
    n.requires_grad = requires_grad;
    if (record_ && requires_grad) n.backprop = std::move(backprop);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::accumulate(int id, const Matrix& g) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.requires_grad) return;
    if (n.grad.data.empty()) n.grad = Matrix(n.value.rows, n.value.cols);
    for (size_t k = 0; k < g.data.size(); ++k) n.grad.data[k] += g.data[k];
}

Tape::Var Tape::input(Matrix v) {
    check_finite(v, "input");
    return push(std::move(v), true, {});
}

Tape::Var Tape::constant(Matrix v) {
    check_finite(v, "constant");
    return push(std::move(v), false, {});
}

Matrix Tape::grad(Var v) const {
    const Node& n = node(v);
    if (n.grad.data.empty()) return Matrix(n.value.rows, n.value.cols);
    return n.grad;
}

void Tape::backward(Var loss) {
    if (backward_done_) throw std::logic_error("tape: backward() called twice");
    if (!record_) throw std::logic_error("tape: backward() on a non-recording tape");
    Node& l = node(loss);
    if (l.value.rows != 1 || l.value.cols != 1)
        throw std::invalid_argument("tape: loss must be scalar");
    l.grad = Matrix(1, 1, 1.0);
    for (int i = loss.id; i >= 0; --i) {
        Node& n = nodes_[static_cast<size_t>(i)];
        if (n.backprop && !n.grad.data.empty()) n.backprop();
        n.backprop = nullptr;  // clear the tape as we go
    }
    backward_done_ = true;
}

// ---------------------------------------------------------------------------

Tape::Var Tape::matmul(Var a, Var b) {
    Matrix c = airgnn::matmul(node(a).value, node(b).value);
    check_finite(c, "matmul");
    bool req = node(a).requires_grad || node(b).requires_grad;
    Var out;
    out = push(std::move(c), req, {});
    if (record_ && req) {
        node(out).backprop = [this, a, b, out]() {
            const Matrix& g = node(out).grad;
            if (node(a).requires_grad) accumulate(a.id, airgnn::matmul(g, transpose(node(b).value)));
            if (node(b).requires_grad) accumulate(b.id, airgnn::matmul(transpose(node(a).value), g));
        };
    }
    return out;
}

Tape::Var Tape::add(Var a, Var b) {
    const Matrix& va = node(a).value;
    const Matrix& vb = node(b).value;
    Matrix c = va;
    bool scalar_b = vb.rows == 1 && vb.cols == 1;
    bool row_b = !scalar_b && vb.rows == 1 && vb.cols == va.cols;
    if (scalar_b) {
        for (double& x : c.data) x += vb.data[0];
    } else if (row_b) {
        for (int i = 0; i < c.rows; ++i)
            for (int j = 0; j < c.cols; ++j) c(i, j) += vb(0, j);
    } else if (va.same_shape(vb)) {
        for (size_t k = 0; k < c.data.size(); ++k) c.data[k] += vb.data[k];
    } else {
        throw std::invalid_argument("add: shape mismatch");
    }
    check_finite(c, "add");
    bool req = node(a).requires_grad || node(b).requires_grad;
    Var out = push(std::move(c), req, {});
    if (record_ && req) {
        node(out).backprop = [this, a, b, out, scalar_b, row_b]() {
            const Matrix& g = node(out).grad;
            if (node(a).requires_grad) accumulate(a.id, g);
            if (!node(b).requires_grad) return;
            if (scalar_b) {
                Matrix gb(1, 1);
                gb.data[0] = std::accumulate(g.data.begin(), g.data.end(), 0.0);
                accumulate(b.id, gb);
            } else if (row_b) {
                Matrix gb(1, g.cols);
                for (int i = 0; i < g.rows; ++i)
                    for (int j = 0; j < g.cols; ++j) gb(0, j) += g(i, j);
                accumulate(b.id, gb);
            } else {
                accumulate(b.id, g);
            }
        };
    }
    return out;
}

Tape::Var Tape::sub(Var a, Var b) { return add(a, scale(b, -1.0)); }

Tape::Var Tape::mul(Var a, Var b) {
    // normalize so a broadcast scalar, if any, sits on the right
    if (node(a).value.rows == 1 && node(a).value.cols == 1 &&
        node(b).value.size() != 1)
        std::swap(a, b);
    const Matrix& va = node(a).value;
    const Matrix& vb = node(b).value;
    bool scalar_b = vb.rows == 1 && vb.cols == 1;
    if (!scalar_b && !va.same_shape(vb)) throw std::invalid_argument("mul: shape mismatch");
    Matrix c = va;
    if (scalar_b) {
        for (double& x : c.data) x *= vb.data[0];
    } else {
        for (size_t k = 0; k < c.data.size(); ++k) c.data[k] *= vb.data[k];
    }
    check_finite(c, "mul");
    bool req = node(a).requires_grad || node(b).requires_grad;
    Var out = push(std::move(c), req, {});
    if (record_ && req) {
        node(out).backprop = [this, a, b, out, scalar_b]() {
            const Matrix& g = node(out).grad;
            const Matrix& va = node(a).value;
            const Matrix& vb = node(b).value;
            if (node(a).requires_grad) {
                Matrix ga = g;
                if (scalar_b)
                    for (double& x : ga.data) x *= vb.data[0];
                else
                    for (size_t k = 0; k < ga.data.size(); ++k) ga.data[k] *= vb.data[k];
                accumulate(a.id, ga);
            }
            if (node(b).requires_grad) {
                if (scalar_b) {
                    Matrix gb(1, 1);
                    for (size_t k = 0; k < g.data.size(); ++k) gb.data[0] += g.data[k] * va.data[k];
                    accumulate(b.id, gb);
                } else {
                    Matrix gb = g;
                    for (size_t k = 0; k < gb.data.size(); ++k) gb.data[k] *= va.data[k];
                    accumulate(b.id, gb);
                }
            }
        };
    }
    return out;
}

Tape::Var Tape::div(Var a, Var b) {
    const Matrix& va = node(a).value;
    const Matrix& vb = node(b).value;
    bool scalar_b = vb.rows == 1 && vb.cols == 1;
    if (!scalar_b && !va.same_shape(vb)) throw std::invalid_argument("div: shape mismatch");
    Matrix c = va;
    if (scalar_b) {
        for (double& x : c.data) x /= vb.data[0];
    } else {
        for (size_t k = 0; k < c.data.size(); ++k) c.data[k] /= vb.data[k];
    }
    check_finite(c, "div");
    bool req = node(a).requires_grad || node(b).requires_grad;
    Var out = push(std::move(c), req, {});
    if (record_ && req) {
        node(out).backprop = [this, a, b, out, scalar_b]() {
            const Matrix& g = node(out).grad;
            const Matrix& va = node(a).value;
            const Matrix& vb = node(b).value;
            if (node(a).requires_grad) {
                Matrix ga = g;
                if (scalar_b)
                    for (double& x : ga.data) x /= vb.data[0];
                else
                    for (size_t k = 0; k < ga.data.size(); ++k) ga.data[k] /= vb.data[k];
                accumulate(a.id, ga);
            }
            if (node(b).requires_grad) {
                if (scalar_b) {
                    Matrix gb(1, 1);
                    const double inv2 = 1.0 / (vb.data[0] * vb.data[0]);
                    for (size_t k = 0; k < g.data.size(); ++k)
                        gb.data[0] -= g.data[k] * va.data[k] * inv2;
                    accumulate(b.id, gb);
                } else {
                    Matrix gb = g;
                    for (size_t k = 0; k < gb.data.size(); ++k)
                        gb.data[k] *= -va.data[k] / (vb.data[k] * vb.data[k]);
                    accumulate(b.id, gb);
                }
            }
        };
    }
    return out;
}

Tape::Var Tape::relu(Var a) {
    Matrix c = node(a).value;
    for (double& x : c.data) x = x > 0.0 ? x : 0.0;
    bool req = node(a).requires_grad;
    Var out = push(std::move(c), req, {});
    if (record_ && req) {
        node(out).backprop = [this, a, out]() {
            const Matrix& g = node(out).grad;
            Matrix ga = g;
            const Matrix& va = node(a).value;
            for (size_t k = 0; k < ga.data.size(); ++k)
                if (va.data[k] <= 0.0) ga.data[k] = 0.0;
            accumulate(a.id, ga);
        };
    }
    return out;
}

Tape::Var Tape::sigmoid(Var a) {
    Matrix c = node(a).value;
    for (double& x : c.data) x = 1.0 / (1.0 + std::exp(-x));
    check_finite(c, "sigmoid");
    bool req = node(a).requires_grad;
    Var out = push(std::move(c), req, {});
    if (record_ && req) {
        node(out).backprop = [this, a, out]() {
            const Matrix& g = node(out).grad;
            const Matrix& s = node(out).value;
            Matrix ga = g;
            for (size_t k = 0; k < ga.data.size(); ++k)
                ga.data[k] *= s.data[k] * (1.0 - s.data[k]);
            accumulate(a.id, ga);
        };
    }
    return out;
}

Tape::Var Tape::log(Var a) {
    Matrix c = node(a).value;
    for (double& x : c.data) x = std::log(x);
    check_finite(c, "log");
    bool req = node(a).requires_grad;
    Var out = push(std::move(c), req, {});
    if (record_ && req) {
        node(out).backprop = [this, a, out]() {
            const Matrix& g = node(out).grad;
            const Matrix& va = node(a).value;
            Matrix ga = g;
            for (size_t k = 0; k < ga.data.size(); ++k) ga.data[k] /= va.data[k];
            accumulate(a.id, ga);
        };
    }
    return out;
}

Tape::Var Tape::sum(Var a) {
    Matrix c(1, 1);
    const Matrix& va = node(a).value;
    c.data[0] = std::accumulate(va.data.begin(), va.data.end(), 0.0);
    check_finite(c, "sum");
    bool req = node(a).requires_grad;
    Var out = push(std::move(c), req, {});
    if (record_ && req) {
        node(out).backprop = [this, a, out]() {
            const double g = node(out).grad.data[0];
            Matrix ga(node(a).value.rows, node(a).value.cols, g);
            accumulate(a.id, ga);
        };
    }
    return out;
}

Tape::Var Tape::mean(Var a) {
    const size_t n = node(a).value.size();
    if (n == 0) throw std::invalid_argument("mean: empty matrix");
    return scale(sum(a), 1.0 / static_cast<double>(n));
}

Tape::Var Tape::scale(Var a, double c) {
    Matrix v = node(a).value;
    for (double& x : v.data) x *= c;
    check_finite(v, "scale");
    bool req = node(a).requires_grad;
    Var out = push(std::move(v), req, {});
    if (record_ && req) {
        node(out).backprop = [this, a, out, c]() {
            Matrix ga = node(out).grad;
            for (double& x : ga.data) x *= c;
            accumulate(a.id, ga);
        };
    }
    return out;
}

Tape::Var Tape::add_scalar(Var a, double c) {
    Matrix v = node(a).value;
    for (double& x : v.data) x += c;
    check_finite(v, "add_scalar");
    bool req = node(a).requires_grad;
    Var out = push(std::move(v), req, {});
    if (record_ && req) {
        node(out).backprop = [this, a, out]() { accumulate(a.id, node(out).grad); };
    }
    return out;
}

Tape::Var Tape::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
    const int rows = node(parts[0]).value.rows;
    int cols = 0;
    bool req = false;
    for (Var p : parts) {
        if (node(p).value.rows != rows) throw std::invalid_argument("concat_cols: row mismatch");
        cols += node(p).value.cols;
        req = req || node(p).requires_grad;
    }
    Matrix c(rows, cols);
    int off = 0;
    for (Var p : parts) {
        const Matrix& v = node(p).value;
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < v.cols; ++j) c(i, off + j) = v(i, j);
        off += v.cols;
    }
    Var out = push(std::move(c), req, {});
    if (record_ && req) {
        std::vector<Var> ps = parts;
        node(out).backprop = [this, ps, out]() {
            const Matrix& g = node(out).grad;
            int off = 0;
            for (Var p : ps) {
                const Matrix& v = node(p).value;
                if (node(p).requires_grad) {
                    Matrix gp(v.rows, v.cols);
                    for (int i = 0; i < v.rows; ++i)
                        for (int j = 0; j < v.cols; ++j) gp(i, j) = g(i, off + j);
                    accumulate(p.id, gp);
                }
                off += v.cols;
            }
        };
    }
    return out;
}

Tape::Var Tape::concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
    const int cols = node(parts[0]).value.cols;
    int rows = 0;
    bool req = false;
    for (Var p : parts) {
        if (node(p).value.cols != cols) throw std::invalid_argument("concat_rows: column mismatch");
        rows += node(p).value.rows;
        req = req || node(p).requires_grad;
    }
    Matrix c(rows, cols);
    int off = 0;
    for (Var p : parts) {
        const Matrix& v = node(p).value;
        for (int i = 0; i < v.rows; ++i)
            for (int j = 0; j < cols; ++j) c(off + i, j) = v(i, j);
        off += v.rows;
    }
    Var out = push(std::move(c), req, {});
    if (record_ && req) {
        std::vector<Var> ps = parts;
        node(out).backprop = [this, ps, out]() {
            const Matrix& g = node(out).grad;
            int off = 0;
            for (Var p : ps) {
                const Matrix& v = node(p).value;
                if (node(p).requires_grad) {
                    Matrix gp(v.rows, v.cols);
                    for (int i = 0; i < v.rows; ++i)
                        for (int j = 0; j < v.cols; ++j) gp(i, j) = g(off + i, j);
                    accumulate(p.id, gp);
                }
                off += v.rows;
            }
        };
    }
    return out;
}

Tape::Var Tape::slice_cols(Var a, int c0, int c1) {
    const Matrix& va = node(a).value;
    if (c0 < 0 || c1 > va.cols || c0 >= c1) throw std::invalid_argument("slice_cols: bad range");
    Matrix c(va.rows, c1 - c0);
    for (int i = 0; i < va.rows; ++i)
        for (int j = c0; j < c1; ++j) c(i, j - c0) = va(i, j);
    bool req = node(a).requires_grad;
    Var out = push(std::move(c), req, {});
    if (record_ && req) {
        node(out).backprop = [this, a, out, c0]() {
            const Matrix& g = node(out).grad;
            Matrix ga(node(a).value.rows, node(a).value.cols);
            for (int i = 0; i < g.rows; ++i)
                for (int j = 0; j < g.cols; ++j) ga(i, c0 + j) = g(i, j);
            accumulate(a.id, ga);
        };
    }
    return out;
}

Tape::Var Tape::gather_rows(Var a, std::vector<int> idx) {
    const Matrix& va = node(a).value;
    Matrix c(static_cast<int>(idx.size()), va.cols);
    for (size_t k = 0; k < idx.size(); ++k) {
        const int r = idx[k];
        if (r < 0 || r >= va.rows) throw std::invalid_argument("gather_rows: index out of range");
        for (int j = 0; j < va.cols; ++j) c(static_cast<int>(k), j) = va(r, j);
    }
    bool req = node(a).requires_grad;
    Var out = push(std::move(c), req, {});
    if (record_ && req) {
        node(out).backprop = [this, a, out, idx = std::move(idx)]() {
            const Matrix& g = node(out).grad;
            Matrix ga(node(a).value.rows, node(a).value.cols);
            for (size_t k = 0; k < idx.size(); ++k)
                for (int j = 0; j < g.cols; ++j) ga(idx[k], j) += g(static_cast<int>(k), j);
            accumulate(a.id, ga);
        };
    }
    return out;
}

}  // namespace airgnn::diffmath
