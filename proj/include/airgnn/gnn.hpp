#pragma once

#include <cstdint>
#include <vector>

#include "airgnn/airphy.hpp"
#include "airgnn/matrix.hpp"
#include "airgnn/mlp.hpp"
#include "airgnn/netgen.hpp"
#include "airgnn/tape.hpp"

namespace airgnn::gnn {

enum class PolicyKind { mpnn, air_mpnn, air_mprnn };

std::string policy_kind_name(PolicyKind k);
PolicyKind policy_kind_from_name(const std::string& name);

/// z-score statistics of the training gain populations, in dB; direct-link
/// and interference-link gains are kept separate. The interference pair also
/// normalizes the aggregated interference power. Linear-domain statistics are
/// useless here: the gain populations span 6+ orders of magnitude, so a
/// linear z-score collapses almost the whole population into a band a few
/// hundredths wide and the policies cannot resolve their inputs.
struct NormStats {
    double direct_mean = 0.0;
    double direct_std = 1.0;
    double interf_mean = 0.0;
    double interf_std = 1.0;
};

double normalize_gain(double x, double mean, double std);

/// Linear power gain -> dB, floored so that an empty aggregate (K = 1) maps
/// to a large-but-finite feature instead of -inf.
double gain_db(double x);

/// The three-MLP policy bundle of one kind.
struct PolicyModel {
    PolicyKind kind = PolicyKind::mpnn;
    int layers = 3;     // 1 for air-mprnn
    int embed_dim = 8;
    diffmath::MlpParams message;  // Phi
    diffmath::MlpParams update;   // U
    diffmath::MlpParams output;   // Omega
    NormStats stats;

    int param_count() const;
    std::vector<Matrix*> parameters();
    std::vector<const Matrix*> parameters() const;

    static PolicyModel create(PolicyKind kind, uint64_t seed);
};

/// Execution options for the Air policies.
struct AirOptions {
    enum class Mode { ideal, physical };
    Mode mode = Mode::ideal;
    double sigma2_mw = 0.0;
    double pmax_mw = 1e4;   // physical pilot power scale (40 dBm)
    const airphy::PilotBank* bank = nullptr;  // physical mode only
    Rng* rng = nullptr;                       // physical mode, sigma2 > 0
    bool noise_bias_correction = false;
    int* broadcast_count = nullptr;  // incremented per simultaneous pilot event
};

// -- evaluation-mode forward passes (no tape) -------------------------------

std::vector<double> mpnn_forward(const Matrix& gains, const PolicyModel& model,
                                 airphy::AggMode agg = airphy::AggMode::sum);

std::vector<double> airmpnn_forward(const netgen::ChannelEpisode& ep, int t,
                                    const PolicyModel& model, const AirOptions& opts);

struct RecurrentState {
    Matrix embedding;            // K x embed_dim
    std::vector<double> z_prev;  // previous-frame direct gains, linear
};

/// Zero embedding plus a bootstrap local-CSI estimate of frame 0.
RecurrentState init_recurrent_state(const netgen::ChannelEpisode& ep, const PolicyModel& model);

std::vector<double> airmprnn_step(RecurrentState& state, const netgen::ChannelEpisode& ep, int t,
                                  const PolicyModel& model, const AirOptions& opts);

// -- taped forward passes (ideal mode, for training) ------------------------

struct PolicyVars {
    diffmath::MlpVars message;
    diffmath::MlpVars update;
    diffmath::MlpVars output;
};

PolicyVars register_policy(diffmath::Tape& tape, const PolicyModel& model);
/// Gradients in the same order as PolicyModel::parameters().
std::vector<Matrix> policy_gradients(const diffmath::Tape& tape, const PolicyVars& vars);

diffmath::Tape::Var mpnn_forward_taped(diffmath::Tape& tape, const Matrix& gains,
                                       const PolicyModel& model, const PolicyVars& vars,
                                       airphy::AggMode agg = airphy::AggMode::sum);

diffmath::Tape::Var airmpnn_forward_taped(diffmath::Tape& tape, const Matrix& gains,
                                          const PolicyModel& model, const PolicyVars& vars);

/// Unrolls the recurrent cell over all frames; returns p(t) per frame.
std::vector<diffmath::Tape::Var> airmprnn_episode_taped(diffmath::Tape& tape,
                                                        const netgen::ChannelEpisode& ep,
                                                        const PolicyModel& model,
                                                        const PolicyVars& vars);

}  // namespace airgnn::gnn
