#include "airgnn/train.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "airgnn/adam.hpp"
#include "airgnn/baselines.hpp"
#include "airgnn/parallel.hpp"

namespace airgnn::train {

using diffmath::Tape;

gnn::NormStats compute_norm_stats(const netgen::Dataset& ds) {
    if (ds.episodes.empty()) throw std::invalid_argument("compute_norm_stats: empty dataset");
    double dsum = 0.0, dsum2 = 0.0, isum = 0.0, isum2 = 0.0;
    long dn = 0, in = 0;
    for (const auto& ep : ds.episodes) {
        for (int t = 0; t < ep.T; ++t) {
            for (int j = 0; j < ep.K; ++j) {
                for (int i = 0; i < ep.K; ++i) {
                    const double g = gnn::gain_db(ep.gain(t, j, i));
                    if (j == i) {
                        dsum += g;
                        dsum2 += g * g;
                        ++dn;
                    } else {
                        isum += g;
                        isum2 += g * g;
                        ++in;
                    }
                }
            }
        }
    }
    gnn::NormStats s;
    s.direct_mean = dsum / static_cast<double>(dn);
    s.direct_std = std::sqrt(std::max(0.0, dsum2 / static_cast<double>(dn) - s.direct_mean * s.direct_mean));
    if (in > 0) {
        s.interf_mean = isum / static_cast<double>(in);
        s.interf_std =
            std::sqrt(std::max(0.0, isum2 / static_cast<double>(in) - s.interf_mean * s.interf_mean));
    }
    if (s.direct_std <= 0.0 || (in > 0 && s.interf_std <= 0.0))
        throw std::runtime_error("compute_norm_stats: degenerate (zero-variance) dataset");
    return s;
}

namespace {

/// Taped weighted sum-rate of one frame (no overhead prefactor).
Tape::Var taped_sum_rate(Tape& tape, Tape::Var p, const Matrix& gains,
                         const std::vector<double>& weights, double sigma2_mw, double pmax_mw) {
    const int K = gains.rows;
    Matrix direct(K, 1);
    Matrix cross(K, K);  // cross(i, j) = pmax * gain j -> i, zero diagonal
    for (int i = 0; i < K; ++i) {
        direct(i, 0) = pmax_mw * gains(i, i);
        for (int j = 0; j < K; ++j)
            if (j != i) cross(i, j) = pmax_mw * gains(j, i);
    }
    const Tape::Var signal = tape.mul(p, tape.constant(direct));
    const Tape::Var interference = tape.matmul(tape.constant(cross), p);
    const Tape::Var xi = tape.div(signal, tape.add_scalar(interference, sigma2_mw));
    const Tape::Var rate = tape.log(tape.add_scalar(xi, 1.0));
    const Tape::Var weighted = tape.mul(rate, tape.constant(Matrix::column(weights)));
    return tape.scale(tape.sum(weighted), 1.0 / std::log(2.0));
}

/// Loss of one sample: negative sum-rate (frame 0), or negative mean over
/// frames for the recurrent kind.
Tape::Var sample_loss(Tape& tape, const gnn::PolicyModel& model, const gnn::PolicyVars& vars,
                      const netgen::ChannelEpisode& ep, int frame, double sigma2_mw,
                      double pmax_mw) {
    const std::vector<double> weights(static_cast<size_t>(ep.K), 1.0);
    switch (model.kind) {
        case gnn::PolicyKind::mpnn: {
            const Matrix gains = ep.gains(frame);
            const Tape::Var p = gnn::mpnn_forward_taped(tape, gains, model, vars);
            return tape.scale(taped_sum_rate(tape, p, gains, weights, sigma2_mw, pmax_mw), -1.0);
        }
        case gnn::PolicyKind::air_mpnn: {
            const Matrix gains = ep.gains(frame);
            const Tape::Var p = gnn::airmpnn_forward_taped(tape, gains, model, vars);
            return tape.scale(taped_sum_rate(tape, p, gains, weights, sigma2_mw, pmax_mw), -1.0);
        }
        case gnn::PolicyKind::air_mprnn: {
            const auto ps = gnn::airmprnn_episode_taped(tape, ep, model, vars);
            Tape::Var total = taped_sum_rate(tape, ps[0], ep.gains(0), weights, sigma2_mw, pmax_mw);
            for (int t = 1; t < ep.T; ++t)
                total = tape.add(total,
                                 taped_sum_rate(tape, ps[static_cast<size_t>(t)], ep.gains(t),
                                                weights, sigma2_mw, pmax_mw));
            return tape.scale(total, -1.0 / static_cast<double>(ep.T));
        }
    }
    throw std::invalid_argument("sample_loss: unknown kind");
}

}  // namespace

double batch_loss_and_grads(const gnn::PolicyModel& model,
                            const std::vector<const netgen::ChannelEpisode*>& batch,
                            double sigma2_mw, double pmax_mw, std::vector<Matrix>* grads,
                            const std::vector<int>* frames) {
    if (batch.empty()) throw std::invalid_argument("batch_loss_and_grads: empty batch");
    if (frames && frames->size() != batch.size())
        throw std::invalid_argument("batch_loss_and_grads: frames/batch size mismatch");
    const double scale = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    for (size_t s = 0; s < batch.size(); ++s) {
        const netgen::ChannelEpisode* ep = batch[s];
        Tape tape;
        const gnn::PolicyVars vars = gnn::register_policy(tape, model);
        const Tape::Var l =
            sample_loss(tape, model, vars, *ep, frames ? (*frames)[s] : 0, sigma2_mw, pmax_mw);
        loss += tape.value(l).data[0] * scale;
        if (grads) {
            tape.backward(l);
            const std::vector<Matrix> g = gnn::policy_gradients(tape, vars);
            if (grads->empty()) {
                grads->resize(g.size());
                for (size_t k = 0; k < g.size(); ++k)
                    (*grads)[k] = Matrix(g[k].rows, g[k].cols);
            }
            for (size_t k = 0; k < g.size(); ++k)
                for (size_t n = 0; n < g[k].data.size(); ++n)
                    (*grads)[k].data[n] += g[k].data[n] * scale;
        }
    }
    return loss;
}

namespace {

double validation_sum_rate(const gnn::PolicyModel& model,
                           const std::vector<const netgen::ChannelEpisode*>& val,
                           double sigma2_mw, double pmax_mw, int threads) {
    if (val.empty()) return 0.0;
    std::vector<double> rates(val.size());
    gnn::AirOptions ideal;
    parallel_for(static_cast<int>(val.size()), threads, [&](int idx) {
        const netgen::ChannelEpisode& ep = *val[static_cast<size_t>(idx)];
        const std::vector<double> weights(static_cast<size_t>(ep.K), 1.0);
        double r = 0.0;
        if (model.kind == gnn::PolicyKind::air_mprnn) {
            gnn::RecurrentState st = gnn::init_recurrent_state(ep, model);
            for (int t = 0; t < ep.T; ++t) {
                const auto p = gnn::airmprnn_step(st, ep, t, model, ideal);
                r += evalmetrics::weighted_sum_rate(p, ep.gains(t), weights, sigma2_mw, pmax_mw,
                                                    0, 1) /
                     ep.T;
            }
        } else {
            const Matrix gains = ep.gains(0);
            const std::vector<double> p = model.kind == gnn::PolicyKind::mpnn
                                              ? gnn::mpnn_forward(gains, model)
                                              : gnn::airmpnn_forward(ep, 0, model, ideal);
            r = evalmetrics::weighted_sum_rate(p, gains, weights, sigma2_mw, pmax_mw, 0, 1);
        }
        rates[static_cast<size_t>(idx)] = r;
    });
    double mean = 0.0;
    for (double r : rates) mean += r;
    return mean / static_cast<double>(rates.size());
}

}  // namespace

TrainResult train(gnn::PolicyKind kind, const netgen::Dataset& ds, const TrainConfig& cfg) {
    if (ds.episodes.empty()) throw std::invalid_argument("train: empty dataset");
    const auto t0 = std::chrono::steady_clock::now();

    // hold out the tail of the dataset for the learning curve
    const int total = static_cast<int>(ds.episodes.size());
    int val_count = static_cast<int>(std::lround(cfg.val_fraction * total));
    if (val_count >= total) val_count = total - 1;
    const int pool = total - val_count;
    std::vector<const netgen::ChannelEpisode*> val;
    for (int i = pool; i < total; ++i) val.push_back(&ds.episodes[static_cast<size_t>(i)]);

    TrainResult result;
    result.model = gnn::PolicyModel::create(kind, Rng::derive(cfg.seed, 0x4D4F44ull));
    result.model.stats = compute_norm_stats(ds);

    const double sigma2 = ds.config.channel.noise_mw();
    const double pmax = ds.config.channel.pmax_mw();
    std::vector<Matrix*> params = result.model.parameters();
    diffmath::AdamState adam = diffmath::AdamState::for_params(params);
    Rng batch_rng(Rng::derive(cfg.seed, 0x424154ull));
    double lr = cfg.initial_lr;

    for (int iter = 0; iter < cfg.iterations; ++iter) {
        if (iter > 0 && cfg.decay_interval > 0 && iter % cfg.decay_interval == 0)
            lr *= cfg.lr_decay;
        const uint64_t batch_seed = batch_rng.next();
        Rng pick(batch_seed);
        std::vector<const netgen::ChannelEpisode*> batch;
        std::vector<int> frames;
        batch.reserve(static_cast<size_t>(cfg.batch_size));
        frames.reserve(static_cast<size_t>(cfg.batch_size));
        for (int b = 0; b < cfg.batch_size; ++b) {
            const int idx = static_cast<int>(pick.next() % static_cast<uint64_t>(pool));
            batch.push_back(&ds.episodes[static_cast<size_t>(idx)]);
            // feed-forward kinds see one frame per sample; draw it uniformly
            // so every fading state of the training set is used
            frames.push_back(kind == gnn::PolicyKind::air_mprnn
                                 ? 0
                                 : static_cast<int>(pick.next() %
                                                    static_cast<uint64_t>(ds.config.T)));
        }

        // per-sample gradients in parallel, reduced in index order
        const int B = static_cast<int>(batch.size());
        std::vector<std::vector<Matrix>> sample_grads(static_cast<size_t>(B));
        std::vector<double> sample_loss_val(static_cast<size_t>(B));
        parallel_for(B, cfg.threads, [&](int b) {
            std::vector<const netgen::ChannelEpisode*> one{batch[static_cast<size_t>(b)]};
            std::vector<int> fr{frames[static_cast<size_t>(b)]};
            sample_loss_val[static_cast<size_t>(b)] = batch_loss_and_grads(
                result.model, one, sigma2, pmax, &sample_grads[static_cast<size_t>(b)], &fr);
        });
        double loss = 0.0;
        std::vector<Matrix> grads(params.size());
        for (size_t k = 0; k < params.size(); ++k)
            grads[k] = Matrix(params[k]->rows, params[k]->cols);
        for (int b = 0; b < B; ++b) {
            loss += sample_loss_val[static_cast<size_t>(b)] / B;
            for (size_t k = 0; k < params.size(); ++k)
                for (size_t n = 0; n < grads[k].data.size(); ++n)
                    grads[k].data[n] += sample_grads[static_cast<size_t>(b)][k].data[n] / B;
        }
        if (!std::isfinite(loss))
            throw std::runtime_error("train: NaN loss at iteration " + std::to_string(iter) +
                                     " (batch seed " + std::to_string(batch_seed) + ")");
        if (cfg.grad_clip_norm > 0.0) {
            // global-norm clipping: the sum-rate landscape has occasional
            // sharp cliffs that otherwise throw the policy across the
            // sigmoid's saturated regions
            double sq = 0.0;
            for (const Matrix& g : grads)
                for (double v : g.data) sq += v * v;
            const double norm = std::sqrt(sq);
            if (norm > cfg.grad_clip_norm) {
                const double s = cfg.grad_clip_norm / norm;
                for (Matrix& g : grads)
                    for (double& v : g.data) v *= s;
            }
        }
        diffmath::adam_step(params, grads, adam, lr);

        if (cfg.curve_interval > 0 &&
            ((iter + 1) % cfg.curve_interval == 0 || iter + 1 == cfg.iterations)) {
            result.curve.push_back(
                {iter + 1, validation_sum_rate(result.model, val, sigma2, pmax, cfg.threads), lr});
        }
    }

    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

// ---------------------------------------------------------------------------

namespace {

EvalResult evaluate_impl(const netgen::Dataset& test, const EvalOptions& opts,
                         evalmetrics::Scheme scheme, const gnn::PolicyModel* model) {
    if (test.episodes.empty()) throw std::invalid_argument("evaluate: empty dataset");
    const double sigma2 = test.config.channel.noise_mw();
    const double pmax = test.config.channel.pmax_mw();
    const int K = test.config.K;
    const long n_o =
        opts.apply_overhead ? evalmetrics::overhead_symbols(scheme, K, opts.overhead) : 0;
    const int n_s = opts.overhead.ns;

    const bool physical = opts.mode == gnn::AirOptions::Mode::physical;
    airphy::PilotBank bank;
    if (physical) bank = airphy::make_pilot_bank(K, K, Rng::derive(opts.seed, 0x50494Cull));

    EvalResult result;
    result.per_layout.assign(test.episodes.size(), 0.0);
    parallel_for(static_cast<int>(test.episodes.size()), opts.threads, [&](int idx) {
        const netgen::ChannelEpisode& ep = test.episodes[static_cast<size_t>(idx)];
        const std::vector<double> weights(static_cast<size_t>(ep.K), 1.0);
        Rng noise_rng(Rng::derive(opts.seed, 0x4E5A0000ull + static_cast<uint64_t>(idx)));
        gnn::AirOptions air;
        air.mode = opts.mode;
        air.sigma2_mw = physical ? opts.pilot_sigma2_mw : 0.0;
        air.pmax_mw = pmax;
        air.bank = physical ? &bank : nullptr;
        air.rng = &noise_rng;
        air.noise_bias_correction = opts.noise_bias_correction;

        double acc = 0.0;
        gnn::RecurrentState st;
        if (model && model->kind == gnn::PolicyKind::air_mprnn)
            st = gnn::init_recurrent_state(ep, *model);
        for (int t = 0; t < ep.T; ++t) {
            std::vector<double> p;
            switch (scheme) {
                case evalmetrics::Scheme::epa:
                    p = baselines::epa(ep.K);
                    break;
                case evalmetrics::Scheme::wmmse: {
                    baselines::WmmseOptions w;
                    w.pmax_mw = pmax;
                    w.sigma2_mw = sigma2;
                    p = baselines::wmmse(ep.gains(t), weights, w);
                    break;
                }
                case evalmetrics::Scheme::air_wmmse: {
                    baselines::AirWmmseOptions w;
                    w.pmax_mw = pmax;
                    w.sigma2_mw = sigma2;
                    w.physical = physical;
                    w.bank = physical ? &bank : nullptr;
                    w.rng = &noise_rng;
                    w.pilot_sigma2_mw = opts.pilot_sigma2_mw;
                    p = baselines::air_wmmse(ep, t, weights, w);
                    break;
                }
                case evalmetrics::Scheme::mpnn:
                    p = gnn::mpnn_forward(ep.gains(t), *model);
                    break;
                case evalmetrics::Scheme::air_mpnn:
                    p = gnn::airmpnn_forward(ep, t, *model, air);
                    break;
                case evalmetrics::Scheme::air_mprnn:
                    p = gnn::airmprnn_step(st, ep, t, *model, air);
                    break;
            }
            acc += evalmetrics::weighted_sum_rate(p, ep.gains(t), weights, sigma2, pmax, n_o, n_s);
        }
        result.per_layout[static_cast<size_t>(idx)] = acc / ep.T;
    });
    for (double r : result.per_layout) result.mean_sum_rate += r;
    result.mean_sum_rate /= static_cast<double>(result.per_layout.size());
    return result;
}

}  // namespace

EvalResult evaluate_policy(const gnn::PolicyModel& model, const netgen::Dataset& test,
                           const EvalOptions& opts) {
    evalmetrics::Scheme scheme;
    switch (model.kind) {
        case gnn::PolicyKind::mpnn: scheme = evalmetrics::Scheme::mpnn; break;
        case gnn::PolicyKind::air_mpnn: scheme = evalmetrics::Scheme::air_mpnn; break;
        case gnn::PolicyKind::air_mprnn: scheme = evalmetrics::Scheme::air_mprnn; break;
        default: throw std::invalid_argument("evaluate_policy: unknown kind");
    }
    return evaluate_impl(test, opts, scheme, &model);
}

EvalResult evaluate_baseline(evalmetrics::Scheme scheme, const netgen::Dataset& test,
                             const EvalOptions& opts) {
    if (scheme == evalmetrics::Scheme::mpnn || scheme == evalmetrics::Scheme::air_mpnn ||
        scheme == evalmetrics::Scheme::air_mprnn)
        throw std::invalid_argument("evaluate_baseline: use evaluate_policy for GNN kinds");
    return evaluate_impl(test, opts, scheme, nullptr);
}

}  // namespace airgnn::train
