#pragma once

#include <cstdint>
#include <vector>

#include "airgnn/evalmetrics.hpp"
#include "airgnn/gnn.hpp"
#include "airgnn/netgen.hpp"

namespace airgnn::train {

struct TrainConfig {
    int batch_size = 50;
    int iterations = 2000;
    double initial_lr = 0.002;
    double lr_decay = 0.9;
    int decay_interval = 100;  // iterations between decay applications
    uint64_t seed = 1;
    double val_fraction = 0.1;   // held out for the learning curve
    int curve_interval = 50;     // validation evaluations along the curve
    double grad_clip_norm = 10.0;  // global-norm clip; <= 0 disables
    int threads = 0;             // 0 = hardware concurrency
};

struct CurvePoint {
    int iteration;
    double val_sum_rate;  // bps/Hz, no overhead discount
    double lr;
};

struct TrainResult {
    gnn::PolicyModel model;
    std::vector<CurvePoint> curve;
    double seconds = 0.0;
};

/// Training-set gain statistics in dB: direct-link and interference-link
/// channel power gains over all layouts and frames.
gnn::NormStats compute_norm_stats(const netgen::Dataset& ds);

/// Unsupervised training against the negative mean weighted sum-rate
/// (overhead prefactor omitted; it is constant per scheme).
TrainResult train(gnn::PolicyKind kind, const netgen::Dataset& ds, const TrainConfig& cfg);

/// Per-sample batch loss and parameter gradients at the current weights;
/// exposed for gradient checks. Feed-forward kinds train on one frame per
/// sample (`frames`, defaulting to frame 0); the recurrent kind always
/// unrolls the whole episode.
double batch_loss_and_grads(const gnn::PolicyModel& model,
                            const std::vector<const netgen::ChannelEpisode*>& batch,
                            double sigma2_mw, double pmax_mw, std::vector<Matrix>* grads,
                            const std::vector<int>* frames = nullptr);

struct EvalOptions {
    evalmetrics::OverheadConfig overhead;
    bool apply_overhead = true;
    gnn::AirOptions::Mode mode = gnn::AirOptions::Mode::ideal;
    bool noise_bias_correction = false;
    double pilot_sigma2_mw = 0.0;  // physical-mode pilot noise
    uint64_t seed = 1;             // physical-mode noise streams
    int threads = 0;
};

struct EvalResult {
    double mean_sum_rate = 0.0;
    std::vector<double> per_layout;  // frame-averaged sum-rate per episode
};

EvalResult evaluate_policy(const gnn::PolicyModel& model, const netgen::Dataset& test,
                           const EvalOptions& opts);
EvalResult evaluate_baseline(evalmetrics::Scheme scheme, const netgen::Dataset& test,
                             const EvalOptions& opts);

}  // namespace airgnn::train
