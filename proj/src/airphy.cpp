#include "airgnn/airphy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace airgnn::airphy {

namespace {

std::complex<double> inner(const std::vector<std::complex<double>>& a,
                           const std::vector<std::complex<double>>& b) {
    std::complex<double> s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
    return s;
}

}  // namespace

PilotBank make_pilot_bank(int K, int Lp, uint64_t seed) {
    if (K < 1) throw std::invalid_argument("make_pilot_bank: K must be >= 1");
    if (Lp < K)
        throw std::invalid_argument("make_pilot_bank: Lp < K, orthogonality impossible");
    PilotBank bank;
    bank.K = K;
    bank.Lp = Lp;
    bank.seq.resize(static_cast<size_t>(K));
    Rng rng(seed);
    // random complex Gaussian vectors, orthonormalized by modified Gram-Schmidt
    for (int i = 0; i < K; ++i) {
        auto& s = bank.seq[static_cast<size_t>(i)];
        for (;;) {
            s.assign(static_cast<size_t>(Lp), 0.0);
            for (auto& x : s) x = rng.cgaussian(1.0);
            for (int j = 0; j < i; ++j) {
                const auto proj = inner(bank.seq[static_cast<size_t>(j)], s);
                for (int k = 0; k < Lp; ++k)
                    s[static_cast<size_t>(k)] -= proj * bank.seq[static_cast<size_t>(j)][static_cast<size_t>(k)];
            }
            double norm2 = 0.0;
            for (const auto& x : s) norm2 += std::norm(x);
            if (norm2 > 1e-12) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (auto& x : s) x *= inv;
                break;
            }
            // numerically degenerate draw, redraw
        }
    }
    return bank;
}

ReceivedPilot receive_pilots(int i, const std::vector<double>& pilot_powers,
                             const std::vector<std::complex<double>>& h_col,
                             const PilotBank& bank, double sigma2, Rng& rng) {
    const size_t K = static_cast<size_t>(bank.K);
    if (pilot_powers.size() != K || h_col.size() != K)
        throw std::invalid_argument("receive_pilots: K mismatch");
    for (double p : pilot_powers)
        if (p < 0.0) throw std::domain_error("receive_pilots: negative pilot power");
    if (sigma2 < 0.0) throw std::domain_error("receive_pilots: negative noise power");
    ReceivedPilot y;
    y.owner = i;
    y.samples.assign(static_cast<size_t>(bank.Lp), 0.0);
    for (size_t j = 0; j < K; ++j) {
        if (pilot_powers[j] == 0.0) continue;
        const std::complex<double> amp = std::sqrt(pilot_powers[j]) * h_col[j];
        const auto& s = bank.seq[j];
        for (int k = 0; k < bank.Lp; ++k) y.samples[static_cast<size_t>(k)] += amp * s[static_cast<size_t>(k)];
    }
    if (sigma2 > 0.0)
        for (auto& x : y.samples) x += rng.cgaussian(sigma2);
    return y;
}

std::vector<ReceivedPilot> broadcast_pilots(const std::vector<double>& pilot_powers,
                                            const std::vector<std::complex<double>>& h,
                                            const PilotBank& bank, double sigma2, Rng& rng) {
    const size_t K = static_cast<size_t>(bank.K);
    if (h.size() != K * K) throw std::invalid_argument("broadcast_pilots: H must be KxK");
    std::vector<ReceivedPilot> out;
    out.reserve(K);
    std::vector<std::complex<double>> col(K);
    for (size_t i = 0; i < K; ++i) {
        for (size_t j = 0; j < K; ++j) col[j] = h[j * K + i];
        out.push_back(receive_pilots(static_cast<int>(i), pilot_powers, col, bank, sigma2, rng));
    }
    return out;
}

double air_sum_estimate(const ReceivedPilot& y, const PilotBank& bank, double noise_bias) {
    if (y.samples.size() != static_cast<size_t>(bank.Lp))
        throw std::invalid_argument("air_sum_estimate: pilot length mismatch");
    double norm2 = 0.0;
    for (const auto& x : y.samples) norm2 += std::norm(x);
    const double own = std::norm(inner(y.samples, bank.seq[static_cast<size_t>(y.owner)]));
    return std::max(0.0, norm2 - own - noise_bias);
}

double air_local_gain(const ReceivedPilot& y, const PilotBank& bank, double p_i) {
    if (p_i <= 0.0)
        throw std::domain_error("air_local_gain: node transmitted no pilot, estimate undefined");
    const double proj = std::norm(inner(y.samples, bank.seq[static_cast<size_t>(y.owner)]));
    return proj / p_i;
}

double air_max_estimate(const ReceivedPilot& y, const PilotBank& bank) {
    double best = 0.0;
    for (int k = 0; k < bank.K; ++k) {
        if (k == y.owner) continue;
        best = std::max(best, std::norm(inner(y.samples, bank.seq[static_cast<size_t>(k)])));
    }
    return best;
}

double exact_aggregate(const std::vector<double>& pilot_powers,
                       const std::vector<double>& gains_col, int i, AggMode mode) {
    const size_t K = pilot_powers.size();
    if (gains_col.size() != K) throw std::invalid_argument("exact_aggregate: K mismatch");
    double sum = 0.0;
    double mx = 0.0;
    for (size_t j = 0; j < K; ++j) {
        if (static_cast<int>(j) == i) continue;
        const double v = pilot_powers[j] * gains_col[j];
        sum += v;
        mx = std::max(mx, v);
    }
    switch (mode) {
        case AggMode::sum: return sum;
        case AggMode::mean: return sum / static_cast<double>(K);
        case AggMode::max: return mx;
    }
    throw std::invalid_argument("exact_aggregate: unknown mode");
}

}  // namespace airgnn::airphy
