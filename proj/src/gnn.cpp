#include "airgnn/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace airgnn::gnn {

using diffmath::MlpParams;
using diffmath::OutputActivation;
using diffmath::Tape;

std::string policy_kind_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::mpnn: return "mpnn";
        case PolicyKind::air_mpnn: return "air-mpnn";
        case PolicyKind::air_mprnn: return "air-mprnn";
    }
    throw std::invalid_argument("policy_kind_name: unknown kind");
}

PolicyKind policy_kind_from_name(const std::string& name) {
    if (name == "mpnn") return PolicyKind::mpnn;
    if (name == "air-mpnn") return PolicyKind::air_mpnn;
    if (name == "air-mprnn") return PolicyKind::air_mprnn;
    throw std::invalid_argument("unknown policy kind: " + name);
}

namespace {

/// -160 dB, well under any physical gain in the simulated geometry
constexpr double kGainFloor = 1e-16;

}  // namespace

double normalize_gain(double x, double mean, double std) {
    if (std <= 0.0) throw std::invalid_argument("normalize_gain: zero standard deviation");
    return (x - mean) / std;
}

// x + floor rather than max(x, floor) so the taped path (log of a shifted
// tape variable) produces bit-identical features
double gain_db(double x) { return 10.0 * std::log10(x + kGainFloor); }

int PolicyModel::param_count() const {
    return message.param_count() + update.param_count() + output.param_count();
}

std::vector<Matrix*> PolicyModel::parameters() {
    std::vector<Matrix*> out;
    for (MlpParams* mlp : {&message, &update, &output}) {
        for (size_t l = 0; l < mlp->weights.size(); ++l) {
            out.push_back(&mlp->weights[l]);
            out.push_back(&mlp->biases[l]);
        }
    }
    return out;
}

std::vector<const Matrix*> PolicyModel::parameters() const {
    std::vector<const Matrix*> out;
    for (const MlpParams* mlp : {&message, &update, &output}) {
        for (size_t l = 0; l < mlp->weights.size(); ++l) {
            out.push_back(&mlp->weights[l]);
            out.push_back(&mlp->biases[l]);
        }
    }
    return out;
}

PolicyModel PolicyModel::create(PolicyKind kind, uint64_t seed) {
    PolicyModel m;
    m.kind = kind;
    Rng rng(seed);
    switch (kind) {
        case PolicyKind::mpnn:
            m.layers = 3;
            m.message = MlpParams::glorot({10, 32, 32}, OutputActivation::linear, rng);
            m.update = MlpParams::glorot({41, 16, 8}, OutputActivation::linear, rng);
            break;
        case PolicyKind::air_mpnn:
            m.layers = 3;
            m.message = MlpParams::glorot({9, 32, 32, 1}, OutputActivation::sigmoid, rng);
            m.update = MlpParams::glorot({10, 16, 8}, OutputActivation::linear, rng);
            break;
        case PolicyKind::air_mprnn:
            m.layers = 1;
            m.message = MlpParams::glorot({9, 32, 32, 1}, OutputActivation::sigmoid, rng);
            m.update = MlpParams::glorot({10, 32, 8}, OutputActivation::linear, rng);
            break;
    }
    m.output = MlpParams::glorot({8, 16, 1}, OutputActivation::sigmoid, rng);
    if (kind == PolicyKind::mpnn) {
        // MPNN sums unnormalized 32-dim messages over all neighbors, so its
        // embeddings are large at initialization and a full-scale random
        // output head saturates the sigmoid and kills the gradient; start
        // that head small so p begins near 0.5. The air kinds aggregate a
        // z-scored scalar and do not need this.
        for (double& w : m.output.weights.back().data) w *= 0.01;
        for (double& b : m.output.biases.back().data) b *= 0.01;
    }
    return m;
}

// ---------------------------------------------------------------------------

namespace {

struct PairIndex {
    std::vector<int> src;  // sender j of each ordered pair (j, i), j != i
    std::vector<int> dst;  // receiver i
};

PairIndex make_pairs(int K) {
    PairIndex p;
    p.src.reserve(static_cast<size_t>(K) * (K - 1));
    p.dst.reserve(p.src.capacity());
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j)
            if (j != i) {
                p.src.push_back(j);
                p.dst.push_back(i);
            }
    return p;
}

void check_kind(const PolicyModel& model, PolicyKind expected, const char* fn) {
    if (model.kind != expected)
        throw std::invalid_argument(std::string(fn) + ": model kind mismatch");
}

Matrix normalized_direct_column(const Matrix& gains, const NormStats& s) {
    Matrix z(gains.rows, 1);
    for (int i = 0; i < gains.rows; ++i)
        z(i, 0) = normalize_gain(gain_db(gains(i, i)), s.direct_mean, s.direct_std);
    return z;
}

std::vector<double> pilot_powers_eval(const Matrix& e, const Matrix& zn,
                                      const PolicyModel& model) {
    const int K = e.rows;
    Matrix in(K, e.cols + 1);
    for (int i = 0; i < K; ++i) {
        for (int j = 0; j < e.cols; ++j) in(i, j) = e(i, j);
        in(i, e.cols) = zn(i, 0);
    }
    const Matrix u = diffmath::mlp_eval(model.message, in);
    std::vector<double> out(static_cast<size_t>(K));
    for (int i = 0; i < K; ++i) out[static_cast<size_t>(i)] = u(i, 0);
    return out;
}

/// Aggregated interference for one frame in normalized pilot-power units
/// (Σ u_j g_ji with u ∈ (0,1)); callers convert to dB before z-scoring.
/// Ideal mode evaluates the closed-form sum; physical mode synthesizes one
/// simultaneous pilot broadcast at u*pmax and rescales the estimates.
std::vector<double> air_aggregate(const std::vector<double>& u, const netgen::ChannelEpisode& ep,
                                  int t, const AirOptions& opts,
                                  std::vector<double>* recovered_gain) {
    const int K = ep.K;
    std::vector<double> agg(static_cast<size_t>(K));
    if (opts.mode == AirOptions::Mode::ideal) {
        for (int i = 0; i < K; ++i) {
            double s = 0.0;
            for (int j = 0; j < K; ++j)
                if (j != i) s += u[static_cast<size_t>(j)] * ep.gain(t, j, i);
            agg[static_cast<size_t>(i)] = s;
        }
        if (recovered_gain)
            for (int i = 0; i < K; ++i) (*recovered_gain)[static_cast<size_t>(i)] = ep.gain(t, i, i);
        return agg;
    }
    if (!opts.bank) throw std::invalid_argument("air_aggregate: physical mode needs a pilot bank");
    if (opts.sigma2_mw > 0.0 && !opts.rng)
        throw std::invalid_argument("air_aggregate: physical mode with noise needs an Rng");
    std::vector<double> powers(static_cast<size_t>(K));
    for (int i = 0; i < K; ++i) powers[static_cast<size_t>(i)] = u[static_cast<size_t>(i)] * opts.pmax_mw;
    std::vector<std::complex<double>> h(static_cast<size_t>(K) * K);
    for (int j = 0; j < K; ++j)
        for (int i = 0; i < K; ++i) h[static_cast<size_t>(j) * K + i] = ep.coeff(t, j, i);
    Rng dummy(1);
    Rng& rng = opts.rng ? *opts.rng : dummy;
    const auto received = airphy::broadcast_pilots(powers, h, *opts.bank, opts.sigma2_mw, rng);
    if (opts.broadcast_count) ++*opts.broadcast_count;
    const double bias =
        opts.noise_bias_correction ? opts.bank->Lp * opts.sigma2_mw : 0.0;
    for (int i = 0; i < K; ++i) {
        agg[static_cast<size_t>(i)] =
            airphy::air_sum_estimate(received[static_cast<size_t>(i)], *opts.bank, bias) /
            opts.pmax_mw;
        if (recovered_gain)
            (*recovered_gain)[static_cast<size_t>(i)] = airphy::air_local_gain(
                received[static_cast<size_t>(i)], *opts.bank, powers[static_cast<size_t>(i)]);
    }
    return agg;
}

}  // namespace

// -- evaluation-mode passes --------------------------------------------------

std::vector<double> mpnn_forward(const Matrix& gains, const PolicyModel& model,
                                 airphy::AggMode agg) {
    check_kind(model, PolicyKind::mpnn, "mpnn_forward");
    const int K = gains.rows;
    const NormStats& s = model.stats;
    const Matrix zn = normalized_direct_column(gains, s);
    const PairIndex pairs = make_pairs(K);
    const int P = static_cast<int>(pairs.src.size());
    const int E = model.embed_dim;
    const int M = model.message.dims.back();

    Matrix e(K, E);
    for (int n = 0; n < model.layers; ++n) {
        Matrix in(P, E + 2);
        for (int r = 0; r < P; ++r) {
            const int j = pairs.src[static_cast<size_t>(r)];
            const int i = pairs.dst[static_cast<size_t>(r)];
            for (int c = 0; c < E; ++c) in(r, c) = e(j, c);
            in(r, E) = zn(j, 0);
            in(r, E + 1) = normalize_gain(gain_db(gains(j, i)), s.interf_mean, s.interf_std);
        }
        const Matrix msg = diffmath::mlp_eval(model.message, in);
        Matrix a(K, M);
        if (agg == airphy::AggMode::max && P > 0)
            a = Matrix(K, M, -std::numeric_limits<double>::infinity());
        for (int r = 0; r < P; ++r) {
            const int i = pairs.dst[static_cast<size_t>(r)];
            for (int c = 0; c < M; ++c) {
                if (agg == airphy::AggMode::max)
                    a(i, c) = std::max(a(i, c), msg(r, c));
                else
                    a(i, c) += msg(r, c);
            }
        }
        if (agg == airphy::AggMode::mean)
            for (double& x : a.data) x /= static_cast<double>(K);
        if (agg == airphy::AggMode::max && P == 0) a = Matrix(K, M);
        Matrix uin(K, E + M + 1);
        for (int i = 0; i < K; ++i) {
            for (int c = 0; c < E; ++c) uin(i, c) = e(i, c);
            for (int c = 0; c < M; ++c) uin(i, E + c) = a(i, c);
            uin(i, E + M) = zn(i, 0);
        }
        e = diffmath::mlp_eval(model.update, uin);
    }
    const Matrix p = diffmath::mlp_eval(model.output, e);
    std::vector<double> out(static_cast<size_t>(K));
    for (int i = 0; i < K; ++i) out[static_cast<size_t>(i)] = p(i, 0);
    return out;
}

std::vector<double> airmpnn_forward(const netgen::ChannelEpisode& ep, int t,
                                    const PolicyModel& model, const AirOptions& opts) {
    check_kind(model, PolicyKind::air_mpnn, "airmpnn_forward");
    const int K = ep.K;
    const NormStats& s = model.stats;
    const Matrix gains = ep.gains(t);
    const Matrix zn = normalized_direct_column(gains, s);
    const int E = model.embed_dim;

    Matrix e(K, E);
    for (int n = 0; n < model.layers; ++n) {
        const std::vector<double> u = pilot_powers_eval(e, zn, model);
        const std::vector<double> agg = air_aggregate(u, ep, t, opts, nullptr);
        Matrix uin(K, E + 2);
        for (int i = 0; i < K; ++i) {
            for (int c = 0; c < E; ++c) uin(i, c) = e(i, c);
            uin(i, E) = normalize_gain(gain_db(agg[static_cast<size_t>(i)]), s.interf_mean, s.interf_std);
            uin(i, E + 1) = zn(i, 0);
        }
        e = diffmath::mlp_eval(model.update, uin);
    }
    const Matrix p = diffmath::mlp_eval(model.output, e);
    std::vector<double> out(static_cast<size_t>(K));
    for (int i = 0; i < K; ++i) out[static_cast<size_t>(i)] = p(i, 0);
    return out;
}

RecurrentState init_recurrent_state(const netgen::ChannelEpisode& ep, const PolicyModel& model) {
    RecurrentState st;
    st.embedding = Matrix(ep.K, model.embed_dim);
    st.z_prev.resize(static_cast<size_t>(ep.K));
    for (int i = 0; i < ep.K; ++i) st.z_prev[static_cast<size_t>(i)] = ep.gain(0, i, i);
    return st;
}

std::vector<double> airmprnn_step(RecurrentState& state, const netgen::ChannelEpisode& ep, int t,
                                  const PolicyModel& model, const AirOptions& opts) {
    check_kind(model, PolicyKind::air_mprnn, "airmprnn_step");
    const int K = ep.K;
    const NormStats& s = model.stats;
    const int E = model.embed_dim;
    if (state.embedding.rows != K || static_cast<int>(state.z_prev.size()) != K)
        throw std::invalid_argument("airmprnn_step: state dimension mismatch");

    // pilot power from the previous frame's embedding and local state
    Matrix zn_prev(K, 1);
    for (int i = 0; i < K; ++i)
        zn_prev(i, 0) = normalize_gain(gain_db(state.z_prev[static_cast<size_t>(i)]), s.direct_mean, s.direct_std);
    const std::vector<double> u = pilot_powers_eval(state.embedding, zn_prev, model);

    // one simultaneous broadcast yields both z(t) and the aggregate
    std::vector<double> z_now(static_cast<size_t>(K));
    const std::vector<double> agg = air_aggregate(u, ep, t, opts, &z_now);

    Matrix uin(K, E + 2);
    for (int i = 0; i < K; ++i) {
        for (int c = 0; c < E; ++c) uin(i, c) = state.embedding(i, c);
        uin(i, E) = normalize_gain(gain_db(agg[static_cast<size_t>(i)]), s.interf_mean, s.interf_std);
        uin(i, E + 1) = normalize_gain(gain_db(z_now[static_cast<size_t>(i)]), s.direct_mean, s.direct_std);
    }
    state.embedding = diffmath::mlp_eval(model.update, uin);
    state.z_prev = z_now;

    const Matrix p = diffmath::mlp_eval(model.output, state.embedding);
    std::vector<double> out(static_cast<size_t>(K));
    for (int i = 0; i < K; ++i) out[static_cast<size_t>(i)] = p(i, 0);
    return out;
}

// -- taped passes -------------------------------------------------------------

PolicyVars register_policy(Tape& tape, const PolicyModel& model) {
    PolicyVars v;
    v.message = diffmath::register_mlp(tape, model.message);
    v.update = diffmath::register_mlp(tape, model.update);
    v.output = diffmath::register_mlp(tape, model.output);
    return v;
}

std::vector<Matrix> policy_gradients(const Tape& tape, const PolicyVars& vars) {
    std::vector<Matrix> out;
    for (const diffmath::MlpVars* mlp : {&vars.message, &vars.update, &vars.output}) {
        for (size_t l = 0; l < mlp->weights.size(); ++l) {
            out.push_back(tape.grad(mlp->weights[l]));
            out.push_back(tape.grad(mlp->biases[l]));
        }
    }
    return out;
}

Tape::Var mpnn_forward_taped(Tape& tape, const Matrix& gains, const PolicyModel& model,
                             const PolicyVars& vars, airphy::AggMode agg) {
    check_kind(model, PolicyKind::mpnn, "mpnn_forward_taped");
    if (agg == airphy::AggMode::max)
        throw std::invalid_argument("mpnn_forward_taped: max aggregation is evaluation-only");
    const int K = gains.rows;
    const NormStats& s = model.stats;
    const PairIndex pairs = make_pairs(K);
    const int P = static_cast<int>(pairs.src.size());
    const int E = model.embed_dim;

    const Tape::Var zn = tape.constant(normalized_direct_column(gains, s));
    Matrix edge(P, 1);
    Matrix aggmat(K, P);  // 0/1 scatter of pair messages onto receivers
    for (int r = 0; r < P; ++r) {
        edge(r, 0) = normalize_gain(gain_db(gains(pairs.src[static_cast<size_t>(r)],
                                                  pairs.dst[static_cast<size_t>(r)])),
                                    s.interf_mean, s.interf_std);
        aggmat(pairs.dst[static_cast<size_t>(r)], r) = 1.0;
    }
    const Tape::Var edge_c = tape.constant(edge);
    const Tape::Var agg_c = tape.constant(aggmat);

    Tape::Var e = tape.constant(Matrix(K, E));
    for (int n = 0; n < model.layers; ++n) {
        const Tape::Var ej = tape.gather_rows(e, pairs.src);
        const Tape::Var zj = tape.gather_rows(zn, pairs.src);
        const Tape::Var msg = diffmath::mlp_apply(tape, vars.message, tape.concat_cols({ej, zj, edge_c}));
        Tape::Var a = tape.matmul(agg_c, msg);
        if (agg == airphy::AggMode::mean) a = tape.scale(a, 1.0 / static_cast<double>(K));
        e = diffmath::mlp_apply(tape, vars.update, tape.concat_cols({e, a, zn}));
    }
    return diffmath::mlp_apply(tape, vars.output, e);
}

namespace {

/// One Air layer shared by the taped Air-MPNN and Air-MPRNN kernels.
Tape::Var air_layer_taped(Tape& tape, const PolicyVars& vars, const NormStats& s,
                          const Matrix& gains, Tape::Var e, Tape::Var zn_pilot,
                          Tape::Var zn_update) {
    const int K = gains.rows;
    Matrix off(K, K);  // off(i, j) = gain j -> i, zero diagonal
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j)
            if (j != i) off(i, j) = gains(j, i);
    const Tape::Var off_c = tape.constant(off);
    const Tape::Var u = diffmath::mlp_apply(tape, vars.message, tape.concat_cols({e, zn_pilot}));
    const Tape::Var agg = tape.matmul(off_c, u);
    // dB of the aggregate, floored like gain_db (u > 0, so the floor only
    // matters for K = 1 where the aggregate is empty)
    const double to_db = 10.0 / std::log(10.0);
    const Tape::Var agg_db = tape.scale(tape.log(tape.add_scalar(agg, kGainFloor)), to_db);
    const Tape::Var aggn =
        tape.scale(tape.add_scalar(agg_db, -s.interf_mean), 1.0 / s.interf_std);
    return diffmath::mlp_apply(tape, vars.update, tape.concat_cols({e, aggn, zn_update}));
}

}  // namespace

Tape::Var airmpnn_forward_taped(Tape& tape, const Matrix& gains, const PolicyModel& model,
                                const PolicyVars& vars) {
    check_kind(model, PolicyKind::air_mpnn, "airmpnn_forward_taped");
    const int K = gains.rows;
    const Tape::Var zn = tape.constant(normalized_direct_column(gains, model.stats));
    Tape::Var e = tape.constant(Matrix(K, model.embed_dim));
    for (int n = 0; n < model.layers; ++n)
        e = air_layer_taped(tape, vars, model.stats, gains, e, zn, zn);
    return diffmath::mlp_apply(tape, vars.output, e);
}

std::vector<Tape::Var> airmprnn_episode_taped(Tape& tape, const netgen::ChannelEpisode& ep,
                                              const PolicyModel& model, const PolicyVars& vars) {
    check_kind(model, PolicyKind::air_mprnn, "airmprnn_episode_taped");
    const int K = ep.K;
    const NormStats& s = model.stats;
    Tape::Var e = tape.constant(Matrix(K, model.embed_dim));
    // bootstrap local state: conventional estimate of frame 0
    Matrix gains0 = ep.gains(0);
    Tape::Var zn_prev = tape.constant(normalized_direct_column(gains0, s));
    std::vector<Tape::Var> out;
    out.reserve(static_cast<size_t>(ep.T));
    for (int t = 0; t < ep.T; ++t) {
        const Matrix gains = t == 0 ? gains0 : ep.gains(t);
        const Tape::Var zn_now = tape.constant(normalized_direct_column(gains, s));
        e = air_layer_taped(tape, vars, s, gains, e, zn_prev, zn_now);
        out.push_back(diffmath::mlp_apply(tape, vars.output, e));
        zn_prev = zn_now;
    }
    return out;
}

}  // namespace airgnn::gnn
