#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "airgnn/baselines.hpp"
#include "airgnn/evalmetrics.hpp"
#include "airgnn/netgen.hpp"

using namespace airgnn;
using namespace airgnn::baselines;

namespace {

constexpr double kPmax = 1e4;
constexpr double kSigma2 = 1e-3;

Matrix random_gains(int K, Rng& rng, double direct = 1e-6, double cross = 1e-7) {
    Matrix g(K, K);
    for (int j = 0; j < K; ++j)
        for (int i = 0; i < K; ++i)
            g(j, i) = (j == i ? direct : cross) * (0.2 + rng.uniform());
    return g;
}

double sum_rate(const std::vector<double>& p, const Matrix& g) {
    const std::vector<double> w(p.size(), 1.0);
    return evalmetrics::weighted_sum_rate(p, g, w, kSigma2, kPmax, 0, 1);
}

// exhaustive grid search over power levels {0, 1/(n-1), ..., 1} per link
double grid_best(const Matrix& g, int levels) {
    const int K = g.rows;
    std::vector<int> idx(static_cast<size_t>(K), 0);
    std::vector<double> p(static_cast<size_t>(K));
    double best = 0.0;
    for (;;) {
        for (int i = 0; i < K; ++i)
            p[static_cast<size_t>(i)] = static_cast<double>(idx[static_cast<size_t>(i)]) / (levels - 1);
        best = std::max(best, sum_rate(p, g));
        int c = 0;
        while (c < K && ++idx[static_cast<size_t>(c)] == levels) {
            idx[static_cast<size_t>(c)] = 0;
            ++c;
        }
        if (c == K) break;
    }
    return best;
}

}  // namespace

TEST_CASE("EPA sends everyone at full power with zero overhead") {
    CHECK(epa(3) == std::vector<double>{1.0, 1.0, 1.0});
    CHECK_THROWS(epa(0));
    evalmetrics::OverheadConfig cfg;
    CHECK(evalmetrics::overhead_symbols(evalmetrics::Scheme::epa, 20, cfg) == 0);
}

TEST_CASE("single link: full power is optimal and WMMSE finds it") {
    Matrix g(1, 1, 1e-6);
    WmmseOptions opts;
    opts.sigma2_mw = kSigma2;
    const auto p = wmmse(g, {1.0}, opts);
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-9));
    // matches the 1-D grid oracle: rate is monotone in p
    CHECK(sum_rate(p, g) == doctest::Approx(grid_best(g, 101)).epsilon(1e-6));
}

TEST_CASE("weighted sum-rate is non-decreasing across iterations") {
    Rng rng(5);
    for (int inst = 0; inst < 20; ++inst) {
        const Matrix g = random_gains(4, rng);
        std::vector<double> trace;
        WmmseOptions opts;
        opts.sigma2_mw = kSigma2;
        opts.rate_trace = &trace;
        wmmse(g, {1.0, 1.0, 1.0, 1.0}, opts);
        REQUIRE(trace.size() == 100);
        for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-9);
    }
}

TEST_CASE("converged WMMSE is a fixed point") {
    Rng rng(11);
    const Matrix g = random_gains(3, rng);
    WmmseOptions a;
    a.sigma2_mw = kSigma2;
    WmmseOptions b = a;
    b.iters = 400;
    WmmseOptions c = a;
    c.iters = 401;
    const auto pb = wmmse(g, {1, 1, 1}, b);
    const auto pc = wmmse(g, {1, 1, 1}, c);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(pb[static_cast<size_t>(i)] - pc[static_cast<size_t>(i)]) < 1e-9);
}

TEST_CASE("crushing symmetric interference drives a near on-off allocation") {
    Matrix g(2, 2);
    g(0, 0) = 1.05e-6;  // slight asymmetry so the block updates can break the tie
    g(1, 1) = 1e-6;
    g(0, 1) = g(1, 0) = 1e-5;  // cross gains dominate
    WmmseOptions opts;
    opts.sigma2_mw = kSigma2;
    const auto p = wmmse(g, {1.0, 1.0}, opts);
    const double lo = std::min(p[0], p[1]);
    const double hi = std::max(p[0], p[1]);
    CHECK(hi > 0.99);
    CHECK(lo < 0.01);
    CHECK(sum_rate(p, g) >= 0.98 * grid_best(g, 101));
}

TEST_CASE("WMMSE(100) reaches 98% of exhaustive grid search on K in {2,3}") {
    // weak-coupling instances (10 dB direct SNR, cross gains one tenth of the
    // direct ones): here the block-coordinate updates reliably reach the
    // global optimum. Under strong coupling the full-power initialization can
    // converge to inferior stationary points, which is a property of the
    // algorithm, not an implementation defect.
    Rng rng(777);
    const double gd = kSigma2 * 10.0 / kPmax;
    for (int inst = 0; inst < 100; ++inst) {
        const int K = 2 + inst % 2;
        Matrix g(K, K);
        for (int j = 0; j < K; ++j)
            for (int i = 0; i < K; ++i)
                g(j, i) = (j == i ? gd : 0.1 * gd) * (0.2 + rng.uniform());
        WmmseOptions opts;
        opts.sigma2_mw = kSigma2;
        const auto p = wmmse(g, std::vector<double>(static_cast<size_t>(K), 1.0), opts);
        CHECK(sum_rate(p, g) >= 0.98 * grid_best(g, 21));
    }
}

TEST_CASE("degenerate channels are rejected") {
    Matrix g(2, 2, 1e-7);
    g(0, 0) = 0.0;
    WmmseOptions opts;
    opts.sigma2_mw = kSigma2;
    CHECK_THROWS(wmmse(g, {1.0, 1.0}, opts));
    CHECK_THROWS(wmmse(Matrix(2, 3), {1.0, 1.0}, opts));
}

TEST_CASE("ideal Air-WMMSE equals one plain WMMSE iteration") {
    Rng rng(17);
    for (int inst = 0; inst < 20; ++inst) {
        const int K = 2 + static_cast<int>(rng.next() % 5);
        Matrix g = random_gains(K, rng);
        netgen::ChannelEpisode ep;
        ep.K = K;
        ep.T = 1;
        ep.g_ls = g;
        ep.h_ss = {std::vector<std::complex<double>>(static_cast<size_t>(K) * K, {1.0, 0.0})};

        WmmseOptions one;
        one.iters = 1;
        one.sigma2_mw = kSigma2;
        const std::vector<double> w(static_cast<size_t>(K), 1.0);
        const auto ref = wmmse(g, w, one);

        AirWmmseOptions opts;
        opts.sigma2_mw = kSigma2;
        const auto p = air_wmmse(ep, 0, w, opts);
        for (int i = 0; i < K; ++i)
            CHECK(p[static_cast<size_t>(i)] ==
                  doctest::Approx(ref[static_cast<size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("noiseless physical Air-WMMSE matches the ideal iteration to 1e-9") {
    Rng rng(23);
    const int K = 6;
    Matrix g = random_gains(K, rng);
    netgen::ChannelEpisode ep = netgen::evolve_episode(g, 0.5, 1, 77);

    const std::vector<double> w(static_cast<size_t>(K), 1.0);
    AirWmmseOptions ideal;
    ideal.sigma2_mw = kSigma2;
    const auto pi = air_wmmse(ep, 0, w, ideal);

    const airphy::PilotBank bank = airphy::make_pilot_bank(K, K, 2);
    Rng noise(3);
    AirWmmseOptions phys = ideal;
    phys.physical = true;
    phys.bank = &bank;
    phys.rng = &noise;
    const auto pp = air_wmmse(ep, 0, w, phys);
    for (int i = 0; i < K; ++i)
        CHECK(pp[static_cast<size_t>(i)] ==
              doctest::Approx(pi[static_cast<size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("Air-WMMSE keeps a single link at full power") {
    netgen::ChannelEpisode ep;
    ep.K = 1;
    ep.T = 1;
    ep.g_ls = Matrix(1, 1, 1e-6);
    ep.h_ss = {{{1.0, 0.0}}};
    AirWmmseOptions opts;
    opts.sigma2_mw = kSigma2;
    CHECK(air_wmmse(ep, 0, {1.0}, opts)[0] == doctest::Approx(1.0).epsilon(1e-9));
    evalmetrics::OverheadConfig cfg;
    CHECK(evalmetrics::overhead_symbols(evalmetrics::Scheme::air_wmmse, 20, cfg) == 60);
}
