#pragma once

#include <string>
#include <vector>

#include "airgnn/matrix.hpp"

namespace airgnn::evalmetrics {

enum class Scheme { epa, wmmse, air_wmmse, mpnn, air_mpnn, air_mprnn };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// Per-frame signaling budget.
struct OverheadConfig {
    int delta_csi = 1;   // symbols per CSI estimation
    int delta_mp = 5;    // symbols per embedding broadcast
    int ns = 3000;       // symbols per frame
    int layers = 3;      // GNN layers N
};

/// Pilot/message symbols consumed per frame by each scheme:
///   epa 0, wmmse K^2*d_csi, air_wmmse 3K*d_csi,
///   mpnn K^2*d_csi + N*K*d_mp, air_mpnn (N+1)*K*d_csi, air_mprnn K*d_csi.
long overhead_symbols(Scheme scheme, int K, const OverheadConfig& cfg);

/// Rate prefactor max(0, (N_S - N_O) / N_S).
double overhead_prefactor(long n_o, int n_s);

/// Linear SINR per link; p in [0,1]^K scaled by pmax_mw, gains(j,i) is the
/// channel power gain tx_j -> rx_i.
std::vector<double> sinr(const std::vector<double>& p, const Matrix& gains, double sigma2_mw,
                         double pmax_mw);

/// Overhead-discounted weighted sum-rate in bps/Hz.
double weighted_sum_rate(const std::vector<double>& p, const Matrix& gains,
                         const std::vector<double>& weights, double sigma2_mw, double pmax_mw,
                         long n_o, int n_s);

}  // namespace airgnn::evalmetrics
