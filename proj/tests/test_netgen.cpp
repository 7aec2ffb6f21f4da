#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "airgnn/netgen.hpp"

using namespace airgnn;
using namespace airgnn::netgen;

TEST_CASE("breakpoint distance and basic pathloss at 2.4 GHz, 1.5 m antennas") {
    ChannelParams cp;
    CHECK(breakpoint_distance_m(cp) == doctest::Approx(72.0).epsilon(1e-3));
    CHECK(basic_pathloss_db(cp) == doctest::Approx(71.17).epsilon(1e-3));
    CHECK(pathloss_db(breakpoint_distance_m(cp), cp) ==
          doctest::Approx(basic_pathloss_db(cp) + 6.0).epsilon(1e-12));
}

TEST_CASE("pathloss branches: 40 dB per decade beyond the breakpoint") {
    ChannelParams cp;
    const double rbp = breakpoint_distance_m(cp);
    CHECK(pathloss_db(10.0 * rbp, cp) - pathloss_db(rbp, cp) == doctest::Approx(40.0).epsilon(1e-12));
    CHECK(pathloss_db(rbp, cp) - pathloss_db(rbp / 10.0, cp) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("pathloss is continuous at the breakpoint") {
    ChannelParams cp;
    const double rbp = breakpoint_distance_m(cp);
    CHECK(pathloss_db(rbp * (1.0 - 1e-12), cp) ==
          doctest::Approx(pathloss_db(rbp * (1.0 + 1e-12), cp)).epsilon(1e-9));
}

TEST_CASE("non-positive distance is a domain error") {
    ChannelParams cp;
    CHECK_THROWS(pathloss_db(0.0, cp));
    CHECK_THROWS(pathloss_db(-3.0, cp));
}

TEST_CASE("layout generation: density, bounds and determinism") {
    const NetworkLayout a = generate_layout(20, 500.0, 2.0, 65.0, 42);
    CHECK(a.link_density() == doctest::Approx(8e-5).epsilon(1e-12));
    const NetworkLayout g2 = generate_layout(45, 750.0, 2.0, 65.0, 1);
    CHECK(g2.link_density() == doctest::Approx(8e-5).epsilon(1e-12));

    const NetworkLayout b = generate_layout(20, 500.0, 2.0, 65.0, 42);
    CHECK(a.tx == b.tx);
    CHECK(a.rx == b.rx);

    for (int i = 0; i < a.K; ++i) {
        const double dx = a.tx[i][0] - a.rx[i][0];
        const double dy = a.tx[i][1] - a.rx[i][1];
        const double d = std::hypot(dx, dy);
        CHECK(d >= 2.0);
        CHECK(d <= 65.0);
        for (int c = 0; c < 2; ++c) {
            CHECK(a.tx[i][c] >= 0.0);
            CHECK(a.tx[i][c] <= 500.0);
            CHECK(a.rx[i][c] >= 0.0);
            CHECK(a.rx[i][c] <= 500.0);
        }
    }
    CHECK_THROWS(generate_layout(2, 500.0, 65.0, 2.0, 3));   // min >= max
    CHECK_THROWS(generate_layout(2, 50.0, 2.0, 65.0, 3));    // max >= field edge
    CHECK_THROWS(generate_layout(0, 500.0, 2.0, 65.0, 3));
}

TEST_CASE("large-scale gains follow the pathloss and antenna gain") {
    ChannelParams cp;
    NetworkLayout lay;
    lay.K = 2;
    lay.field_len = 1000.0;
    lay.tx = {{0.0, 0.0}, {0.0, 100.0}};
    const double rbp = breakpoint_distance_m(cp);
    lay.rx = {{rbp, 0.0}, {0.0, 100.0 + rbp}};  // both direct links at the breakpoint
    const Matrix g = large_scale_gains(lay, cp);
    CHECK(g(0, 0) == doctest::Approx(g(1, 1)).epsilon(1e-12));
    const double expected = std::pow(10.0, (cp.antenna_gain_db - pathloss_db(rbp, cp)) / 10.0);
    CHECK(g(0, 0) == doctest::Approx(expected).epsilon(1e-12));

    lay.rx[0] = {10.0 * rbp, 0.0};  // one decade further: 40 dB -> 1e-4 gain ratio
    const Matrix g2 = large_scale_gains(lay, cp);
    CHECK(g2(0, 0) / g(0, 0) == doctest::Approx(1e-4).epsilon(1e-10));
}

TEST_CASE("coincident endpoints are rejected") {
    ChannelParams cp;
    NetworkLayout lay;
    lay.K = 1;
    lay.field_len = 10.0;
    lay.tx = {{1.0, 1.0}};
    lay.rx = {{1.0, 1.0}};
    CHECK_THROWS(large_scale_gains(lay, cp));
}

TEST_CASE("episode evolution validates its arguments") {
    const Matrix g(2, 2, 1e-8);
    CHECK_THROWS(evolve_episode(g, -0.1, 5, 1));
    CHECK_THROWS(evolve_episode(g, 1.0, 5, 1));
    CHECK_THROWS(evolve_episode(g, 0.5, 0, 1));
}

TEST_CASE("AR(1) small-scale fading statistics") {
    const Matrix g(1, 1, 1.0);

    SUBCASE("rho = 0 gives uncorrelated frames") {
        double acc = 0.0;
        int n = 0;
        for (uint64_t s = 0; s < 500; ++s) {
            const ChannelEpisode ep = evolve_episode(g, 0.0, 200, 1000 + s);
            for (int t = 0; t + 1 < ep.T; ++t) {
                acc += ep.small_scale(t, 0, 0).real() * ep.small_scale(t + 1, 0, 0).real();
                ++n;
            }
        }
        CHECK(std::abs(acc * 2.0 / n) < 0.01);  // real part has variance 1/2
    }

    SUBCASE("rho = 0.99 gives matching lag-1 correlation") {
        double acc = 0.0, var_re = 0.0, var_all = 0.0;
        int n = 0;
        for (uint64_t s = 0; s < 500; ++s) {
            const ChannelEpisode ep = evolve_episode(g, 0.99, 200, 2000 + s);
            for (int t = 0; t + 1 < ep.T; ++t) {
                acc += ep.small_scale(t, 0, 0).real() * ep.small_scale(t + 1, 0, 0).real();
                var_re += ep.small_scale(t, 0, 0).real() * ep.small_scale(t, 0, 0).real();
                var_all += std::norm(ep.small_scale(t, 0, 0));
                ++n;
            }
        }
        // regression-ratio estimator: robust to the slow variance mixing of a
        // near-unit-root AR(1)
        CHECK(acc / var_re == doctest::Approx(0.99).epsilon(0.02));
        CHECK(var_all / n == doctest::Approx(1.0).epsilon(0.05));
    }

    SUBCASE("stationarity: E|h_ss|^2 = 1 at every frame") {
        for (double rho : {0.0, 0.5, 0.95}) {
            double first = 0.0, last = 0.0;
            const int reps = 20000;
            for (uint64_t s = 0; s < reps; ++s) {
                const ChannelEpisode ep = evolve_episode(g, rho, 10, 30000 + s);
                first += std::norm(ep.small_scale(0, 0, 0));
                last += std::norm(ep.small_scale(9, 0, 0));
            }
            CHECK(first / reps == doctest::Approx(1.0).epsilon(0.02));
            CHECK(last / reps == doctest::Approx(1.0).epsilon(0.02));
        }
    }
}

TEST_CASE("stored gains decompose exactly into large- and small-scale parts") {
    Matrix g(3, 3);
    Rng rng(5);
    for (double& v : g.data) v = rng.uniform() * 1e-6;
    const ChannelEpisode ep = evolve_episode(g, 0.7, 6, 9);
    for (int t = 0; t < ep.T; ++t)
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) {
                CHECK(ep.gain(t, j, i) == g(j, i) * std::norm(ep.small_scale(t, j, i)));
                CHECK(std::norm(ep.coeff(t, j, i)) ==
                      doctest::Approx(ep.gain(t, j, i)).epsilon(1e-12));
            }
}

TEST_CASE("noise power conversions") {
    CHECK(noise_power_mw(-169.0, 5e6) == doctest::Approx(6.31e-11).epsilon(0.01));
    CHECK(noise_power_mw(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    const double one = noise_power_mw(-100.0, 1e6);
    const double two = noise_power_mw(-100.0, 2e6);
    CHECK(10.0 * std::log10(two / one) == doctest::Approx(3.0103).epsilon(1e-4));
    ChannelParams cp;
    CHECK(cp.noise_mw() == doctest::Approx(6.31e-11).epsilon(0.01));
    CHECK(cp.pmax_mw() == doctest::Approx(1e4).epsilon(1e-12));
}

TEST_CASE("dataset generation is deterministic and round-trips bit-exactly") {
    DatasetConfig cfg;
    cfg.K = 4;
    cfg.layouts = 6;
    cfg.T = 5;
    cfg.seed = 77;
    const Dataset a = generate_dataset(cfg);
    const Dataset b = generate_dataset(cfg);
    REQUIRE(a.episodes.size() == 6);
    for (size_t l = 0; l < a.episodes.size(); ++l) {
        CHECK(a.episodes[l].rho == b.episodes[l].rho);
        CHECK(a.episodes[l].g_ls.data == b.episodes[l].g_ls.data);
        CHECK(a.episodes[l].h_ss == b.episodes[l].h_ss);
    }

    const std::string path = (std::filesystem::temp_directory_path() / "ng_roundtrip.bin").string();
    a.save(path);
    const Dataset c = Dataset::load(path);
    std::filesystem::remove(path);
    CHECK(c.config.K == cfg.K);
    CHECK(c.config.seed == cfg.seed);
    REQUIRE(c.episodes.size() == a.episodes.size());
    for (size_t l = 0; l < a.episodes.size(); ++l) {
        CHECK(c.episodes[l].rho == a.episodes[l].rho);
        CHECK(c.episodes[l].g_ls.data == a.episodes[l].g_ls.data);
        CHECK(c.episodes[l].h_ss == a.episodes[l].h_ss);
    }
}

TEST_CASE("fixed-rho datasets carry the requested coefficient") {
    DatasetConfig cfg;
    cfg.K = 3;
    cfg.layouts = 4;
    cfg.T = 3;
    cfg.rho_mode = RhoMode::fixed;
    cfg.rho_fixed = 0.8;
    const Dataset ds = generate_dataset(cfg);
    for (const auto& ep : ds.episodes) CHECK(ep.rho == 0.8);
}
