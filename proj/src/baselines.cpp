#include "airgnn/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "airgnn/evalmetrics.hpp"

namespace airgnn::baselines {

std::vector<double> epa(int K) {
    if (K < 1) throw std::invalid_argument("epa: K must be >= 1");
    return std::vector<double>(static_cast<size_t>(K), 1.0);
}

namespace {

struct WmmseScratch {
    std::vector<double> v, u, w, h;  // amplitudes and block variables
};

void wmmse_iteration(const Matrix& gains, const std::vector<double>& alpha, double sigma2,
                     double vmax, WmmseScratch& s) {
    const int K = gains.rows;
    // u-step: MMSE receiver
    for (int i = 0; i < K; ++i) {
        double total = sigma2;
        for (int j = 0; j < K; ++j)
            total += gains(j, i) * s.v[static_cast<size_t>(j)] * s.v[static_cast<size_t>(j)];
        if (total <= 0.0)
            throw std::domain_error("wmmse: degenerate channel (zero signal plus noise power)");
        s.u[static_cast<size_t>(i)] = s.h[static_cast<size_t>(i)] * s.v[static_cast<size_t>(i)] / total;
    }
    // w-step: inverse MSE weight
    for (int i = 0; i < K; ++i) {
        const double e = 1.0 - s.u[static_cast<size_t>(i)] * s.h[static_cast<size_t>(i)] *
                                   s.v[static_cast<size_t>(i)];
        if (e <= 0.0) throw std::domain_error("wmmse: non-positive MSE");
        s.w[static_cast<size_t>(i)] = 1.0 / e;
    }
    // v-step: closed-form quadratic solve, clamped to the amplitude bound
    for (int i = 0; i < K; ++i) {
        double denom = 0.0;
        for (int j = 0; j < K; ++j)
            denom += alpha[static_cast<size_t>(j)] * s.w[static_cast<size_t>(j)] *
                     s.u[static_cast<size_t>(j)] * s.u[static_cast<size_t>(j)] * gains(i, j);
        double v = denom > 0.0 ? alpha[static_cast<size_t>(i)] * s.w[static_cast<size_t>(i)] *
                                     s.u[static_cast<size_t>(i)] * s.h[static_cast<size_t>(i)] / denom
                               : vmax;
        if (v < 0.0) v = 0.0;
        if (v > vmax) v = vmax;
        s.v[static_cast<size_t>(i)] = v;
    }
}

WmmseScratch make_scratch(const Matrix& gains, double vmax) {
    const int K = gains.rows;
    WmmseScratch s;
    s.v.assign(static_cast<size_t>(K), vmax);
    s.u.assign(static_cast<size_t>(K), 0.0);
    s.w.assign(static_cast<size_t>(K), 1.0);
    s.h.resize(static_cast<size_t>(K));
    for (int i = 0; i < K; ++i) {
        if (gains(i, i) <= 0.0) throw std::domain_error("wmmse: non-positive direct gain");
        s.h[static_cast<size_t>(i)] = std::sqrt(gains(i, i));
    }
    return s;
}

std::vector<double> powers_from(const WmmseScratch& s, double pmax) {
    std::vector<double> p(s.v.size());
    for (size_t i = 0; i < p.size(); ++i) p[i] = s.v[i] * s.v[i] / pmax;
    return p;
}

}  // namespace

std::vector<double> wmmse(const Matrix& gains, const std::vector<double>& weights,
                          const WmmseOptions& opts) {
    const int K = gains.rows;
    if (gains.cols != K || static_cast<int>(weights.size()) != K)
        throw std::invalid_argument("wmmse: dimension mismatch");
    const double vmax = std::sqrt(opts.pmax_mw);
    WmmseScratch s = make_scratch(gains, vmax);
    for (int it = 0; it < opts.iters; ++it) {
        wmmse_iteration(gains, weights, opts.sigma2_mw, vmax, s);
        if (opts.rate_trace)
            opts.rate_trace->push_back(evalmetrics::weighted_sum_rate(
                powers_from(s, opts.pmax_mw), gains, weights, opts.sigma2_mw, opts.pmax_mw, 0, 1));
    }
    return powers_from(s, opts.pmax_mw);
}

std::vector<double> air_wmmse(const netgen::ChannelEpisode& ep, int t,
                              const std::vector<double>& weights, const AirWmmseOptions& opts) {
    const int K = ep.K;
    if (static_cast<int>(weights.size()) != K)
        throw std::invalid_argument("air_wmmse: weight dimension mismatch");
    const Matrix gains = ep.gains(t);
    const double vmax = std::sqrt(opts.pmax_mw);
    WmmseScratch s = make_scratch(gains, vmax);

    // Broadcast 1 (forward links, pilot powers v^2): received total power for
    // the u-step. Broadcast 2 (reverse links, powers w*u^2*alpha): v-step sum.
    std::vector<double> rx_power(static_cast<size_t>(K));
    std::vector<double> v_denom(static_cast<size_t>(K));
    if (!opts.physical) {
        for (int i = 0; i < K; ++i) {
            double total = 0.0;
            for (int j = 0; j < K; ++j)
                total += gains(j, i) * s.v[static_cast<size_t>(j)] * s.v[static_cast<size_t>(j)];
            rx_power[static_cast<size_t>(i)] = total;
        }
    } else {
        if (!opts.bank) throw std::invalid_argument("air_wmmse: physical mode needs a pilot bank");
        Rng dummy(1);
        Rng& rng = opts.rng ? *opts.rng : dummy;
        std::vector<double> powers(static_cast<size_t>(K));
        for (int i = 0; i < K; ++i)
            powers[static_cast<size_t>(i)] = s.v[static_cast<size_t>(i)] * s.v[static_cast<size_t>(i)];
        std::vector<std::complex<double>> h(static_cast<size_t>(K) * K);
        for (int j = 0; j < K; ++j)
            for (int i = 0; i < K; ++i) h[static_cast<size_t>(j) * K + i] = ep.coeff(t, j, i);
        const auto rx = airphy::broadcast_pilots(powers, h, *opts.bank, opts.pilot_sigma2_mw, rng);
        for (int i = 0; i < K; ++i) {
            double norm2 = 0.0;
            for (const auto& x : rx[static_cast<size_t>(i)].samples) norm2 += std::norm(x);
            rx_power[static_cast<size_t>(i)] = norm2;
        }
    }

    // u- and w-steps from the first broadcast
    const double sigma2 = opts.sigma2_mw;
    for (int i = 0; i < K; ++i) {
        const double total = rx_power[static_cast<size_t>(i)] + sigma2;
        if (total <= 0.0) throw std::domain_error("air_wmmse: degenerate channel");
        s.u[static_cast<size_t>(i)] = s.h[static_cast<size_t>(i)] * s.v[static_cast<size_t>(i)] / total;
        // pilot noise can push the received norm slightly below the own-link
        // power, so the MSE estimate is floored rather than rejected
        const double e = std::max(1e-12, 1.0 - s.u[static_cast<size_t>(i)] *
                                             s.h[static_cast<size_t>(i)] *
                                             s.v[static_cast<size_t>(i)]);
        s.w[static_cast<size_t>(i)] = 1.0 / e;
    }

    if (!opts.physical) {
        for (int i = 0; i < K; ++i) {
            double denom = 0.0;
            for (int j = 0; j < K; ++j)
                denom += weights[static_cast<size_t>(j)] * s.w[static_cast<size_t>(j)] *
                         s.u[static_cast<size_t>(j)] * s.u[static_cast<size_t>(j)] * gains(i, j);
            v_denom[static_cast<size_t>(i)] = denom;
        }
    } else {
        Rng dummy(2);
        Rng& rng = opts.rng ? *opts.rng : dummy;
        std::vector<double> powers(static_cast<size_t>(K));
        for (int j = 0; j < K; ++j)
            powers[static_cast<size_t>(j)] = weights[static_cast<size_t>(j)] *
                                             s.w[static_cast<size_t>(j)] *
                                             s.u[static_cast<size_t>(j)] * s.u[static_cast<size_t>(j)];
        // reverse direction: pair j's receiver broadcasts, pair i's transmitter
        // listens over the reciprocal channel tx_i -> rx_j
        std::vector<std::complex<double>> hrev(static_cast<size_t>(K) * K);
        for (int j = 0; j < K; ++j)
            for (int i = 0; i < K; ++i) hrev[static_cast<size_t>(j) * K + i] = ep.coeff(t, i, j);
        const auto rx = airphy::broadcast_pilots(powers, hrev, *opts.bank, opts.pilot_sigma2_mw, rng);
        for (int i = 0; i < K; ++i) {
            double norm2 = 0.0;
            for (const auto& x : rx[static_cast<size_t>(i)].samples) norm2 += std::norm(x);
            v_denom[static_cast<size_t>(i)] = norm2;
        }
    }

    for (int i = 0; i < K; ++i) {
        const double denom = v_denom[static_cast<size_t>(i)];
        double v = denom > 0.0 ? weights[static_cast<size_t>(i)] * s.w[static_cast<size_t>(i)] *
                                     s.u[static_cast<size_t>(i)] * s.h[static_cast<size_t>(i)] / denom
                               : vmax;
        if (v < 0.0) v = 0.0;
        if (v > vmax) v = vmax;
        s.v[static_cast<size_t>(i)] = v;
    }
    return powers_from(s, opts.pmax_mw);
}

}  // namespace airgnn::baselines
