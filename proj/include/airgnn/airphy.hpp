#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "airgnn/rng.hpp"

namespace airgnn::airphy {

/// K mutually orthonormal complex pilot sequences of length Lp >= K.
struct PilotBank {
    int K = 0;
    int Lp = 0;
    std::vector<std::vector<std::complex<double>>> seq;  // seq[i] has Lp samples
};

struct ReceivedPilot {
    int owner = -1;
    std::vector<std::complex<double>> samples;
};

enum class AggMode { sum, mean, max };

PilotBank make_pilot_bank(int K, int Lp, uint64_t seed);

/// Superimposed pilot signal at node i: sum_j sqrt(p_j) h[j] s_j + noise.
/// h_col[j] is the complex coefficient of the link tx_j -> rx_i; sigma2 = 0
/// gives the noiseless mode.
ReceivedPilot receive_pilots(int i, const std::vector<double>& pilot_powers,
                             const std::vector<std::complex<double>>& h_col,
                             const PilotBank& bank, double sigma2, Rng& rng);

/// One simultaneous broadcast: every node's received signal from a single
/// pilot event. h[j * K + i] is the coefficient tx_j -> rx_i.
std::vector<ReceivedPilot> broadcast_pilots(const std::vector<double>& pilot_powers,
                                            const std::vector<std::complex<double>>& h,
                                            const PilotBank& bank, double sigma2, Rng& rng);

/// Aggregated interference power estimate ||y||^2 - |y^H s_i|^2.
/// With bias_correction, Lp * sigma2 is subtracted and the result clamped at 0.
double air_sum_estimate(const ReceivedPilot& y, const PilotBank& bank,
                        double noise_bias = 0.0);

/// Direct-link gain estimate |y^H s_i|^2 / p_i.
double air_local_gain(const ReceivedPilot& y, const PilotBank& bank, double p_i);

/// Maximal interference power estimate max_{k != i} |y^H s_k|^2.
double air_max_estimate(const ReceivedPilot& y, const PilotBank& bank);

/// Oracle aggregate over j != i of p_j * gains_col[j]; mean divides by the
/// broadcast node count K.
double exact_aggregate(const std::vector<double>& pilot_powers,
                       const std::vector<double>& gains_col, int i, AggMode mode);

}  // namespace airgnn::airphy
