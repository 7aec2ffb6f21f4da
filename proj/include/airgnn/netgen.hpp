#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "airgnn/matrix.hpp"
#include "airgnn/rng.hpp"

namespace airgnn::netgen {

/// Physical-layer constants of the simulated network.
struct ChannelParams {
    double carrier_hz = 2.4e9;
    double tx_height_m = 1.5;
    double rx_height_m = 1.5;
    // one 2.5 dBi antenna counted at each end of a link
    double antenna_gain_db = 5.0;
    double bandwidth_hz = 5e6;
    double noise_psd_dbm_hz = -169.0;
    double pmax_dbm = 40.0;

    double wavelength_m() const { return 299792458.0 / carrier_hz; }
    double pmax_mw() const;
    double noise_mw() const;
};

struct NetworkLayout {
    int K = 0;
    double field_len = 0.0;
    std::vector<std::array<double, 2>> tx;
    std::vector<std::array<double, 2>> rx;

    double link_density() const { return K / (field_len * field_len); }
};

/// Time-correlated block-fading episode: per-frame small-scale states on top
/// of fixed large-scale gains. Entry (j, i) refers to the link tx_j -> rx_i.
struct ChannelEpisode {
    int K = 0;
    int T = 0;
    double rho = 0.0;
    Matrix g_ls;                                             // K x K, linear
    std::vector<std::vector<std::complex<double>>> h_ss;     // T frames of K*K

    std::complex<double> small_scale(int t, int j, int i) const {
        return h_ss[t][static_cast<size_t>(j) * K + i];
    }
    /// |h(t)|^2 = g_ls * |h_ss(t)|^2, by construction exact
    double gain(int t, int j, int i) const {
        return g_ls(j, i) * std::norm(small_scale(t, j, i));
    }
    Matrix gains(int t) const;
    /// complex channel coefficient sqrt(g_ls) * h_ss for signal-level models
    std::complex<double> coeff(int t, int j, int i) const;
};

double pathloss_db(double d_m, const ChannelParams& cp);
double breakpoint_distance_m(const ChannelParams& cp);
double basic_pathloss_db(const ChannelParams& cp);

NetworkLayout generate_layout(int K, double field_len, double min_dist, double max_dist,
                              uint64_t seed);
Matrix large_scale_gains(const NetworkLayout& layout, const ChannelParams& cp);
ChannelEpisode evolve_episode(const Matrix& g_ls, double rho, int T, uint64_t seed);
double noise_power_mw(double psd_dbm_hz, double bandwidth_hz);

enum class RhoMode : uint32_t { uniform = 0, fixed = 1 };

struct DatasetConfig {
    int K = 20;
    double field_len = 500.0;
    int T = 10;
    int layouts = 2000;
    double min_dist = 2.0;
    double max_dist = 20.0;
    RhoMode rho_mode = RhoMode::uniform;
    double rho_fixed = 0.0;
    uint64_t seed = 1;
    ChannelParams channel;
};

/// Self-describing channel dataset; see docs/formats.md for the byte layout.
struct Dataset {
    DatasetConfig config;
    std::vector<ChannelEpisode> episodes;

    void save(const std::string& path) const;
    static Dataset load(const std::string& path);
};

Dataset generate_dataset(const DatasetConfig& cfg);

}  // namespace airgnn::netgen
