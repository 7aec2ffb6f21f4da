#pragma once

#include <vector>

#include "airgnn/airphy.hpp"
#include "airgnn/matrix.hpp"
#include "airgnn/netgen.hpp"
#include "airgnn/rng.hpp"

namespace airgnn::baselines {

/// Equal power allocation: everyone at maximum power, no signaling overhead.
std::vector<double> epa(int K);

struct WmmseOptions {
    int iters = 100;
    double pmax_mw = 1e4;
    double sigma2_mw = 0.0;
    /// when set, the weighted sum-rate after each iteration is appended
    std::vector<double>* rate_trace = nullptr;
};

/// Scalar-channel WMMSE block updates on channel amplitudes, initialized at
/// full power; returns normalized powers p = v^2 / pmax in [0,1]^K.
std::vector<double> wmmse(const Matrix& gains, const std::vector<double>& weights,
                          const WmmseOptions& opts);

struct AirWmmseOptions {
    double pmax_mw = 1e4;
    double sigma2_mw = 0.0;
    bool physical = false;  // over-the-air sums from signal-level pilots
    const airphy::PilotBank* bank = nullptr;
    Rng* rng = nullptr;
    double pilot_sigma2_mw = 0.0;  // noise on the pilot broadcasts
};

/// One WMMSE iteration whose cross-link statistics come from two simultaneous
/// pilot broadcasts instead of per-link CSI; overhead 3*K*delta_csi.
std::vector<double> air_wmmse(const netgen::ChannelEpisode& ep, int t,
                              const std::vector<double>& weights, const AirWmmseOptions& opts);

}  // namespace airgnn::baselines
