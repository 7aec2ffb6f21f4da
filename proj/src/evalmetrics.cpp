#include "airgnn/evalmetrics.hpp"

#include <cmath>
#include <stdexcept>

namespace airgnn::evalmetrics {

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::epa: return "epa";
        case Scheme::wmmse: return "wmmse";
        case Scheme::air_wmmse: return "air-wmmse";
        case Scheme::mpnn: return "mpnn";
        case Scheme::air_mpnn: return "air-mpnn";
        case Scheme::air_mprnn: return "air-mprnn";
    }
    throw std::invalid_argument("scheme_name: unknown scheme");
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "epa") return Scheme::epa;
    if (name == "wmmse") return Scheme::wmmse;
    if (name == "air-wmmse") return Scheme::air_wmmse;
    if (name == "mpnn") return Scheme::mpnn;
    if (name == "air-mpnn") return Scheme::air_mpnn;
    if (name == "air-mprnn") return Scheme::air_mprnn;
    throw std::invalid_argument("unknown scheme: " + name);
}

long overhead_symbols(Scheme scheme, int K, const OverheadConfig& cfg) {
    const long k = K;
    const long dc = cfg.delta_csi;
    const long dm = cfg.delta_mp;
    const long n = cfg.layers;
    switch (scheme) {
        case Scheme::epa: return 0;
        case Scheme::wmmse: return k * k * dc;
        case Scheme::air_wmmse: return 3 * k * dc;
        case Scheme::mpnn: return k * k * dc + n * k * dm;
        case Scheme::air_mpnn: return (n + 1) * k * dc;
        case Scheme::air_mprnn: return k * dc;
    }
    throw std::invalid_argument("overhead_symbols: unknown scheme");
}

double overhead_prefactor(long n_o, int n_s) {
    if (n_s < 1) throw std::invalid_argument("overhead_prefactor: N_S must be >= 1");
    const double f = static_cast<double>(n_s - n_o) / static_cast<double>(n_s);
    return f > 0.0 ? f : 0.0;
}

std::vector<double> sinr(const std::vector<double>& p, const Matrix& gains, double sigma2_mw,
                         double pmax_mw) {
    const int K = gains.rows;
    if (gains.cols != K || static_cast<int>(p.size()) != K)
        throw std::invalid_argument("sinr: dimension mismatch");
    std::vector<double> out(static_cast<size_t>(K));
    for (int i = 0; i < K; ++i) {
        double interference = 0.0;
        for (int j = 0; j < K; ++j)
            if (j != i) interference += p[static_cast<size_t>(j)] * pmax_mw * gains(j, i);
        out[static_cast<size_t>(i)] =
            p[static_cast<size_t>(i)] * pmax_mw * gains(i, i) / (interference + sigma2_mw);
    }
    return out;
}

double weighted_sum_rate(const std::vector<double>& p, const Matrix& gains,
                         const std::vector<double>& weights, double sigma2_mw, double pmax_mw,
                         long n_o, int n_s) {
    const std::vector<double> xi = sinr(p, gains, sigma2_mw, pmax_mw);
    if (weights.size() != xi.size())
        throw std::invalid_argument("weighted_sum_rate: weight dimension mismatch");
    const double pre = overhead_prefactor(n_o, n_s);
    double total = 0.0;
    for (size_t i = 0; i < xi.size(); ++i) total += weights[i] * pre * std::log2(1.0 + xi[i]);
    return total;
}

}  // namespace airgnn::evalmetrics
