#include "airgnn/netgen.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace airgnn::netgen {

double ChannelParams::pmax_mw() const { return std::pow(10.0, pmax_dbm / 10.0); }
double ChannelParams::noise_mw() const { return noise_power_mw(noise_psd_dbm_hz, bandwidth_hz); }

double breakpoint_distance_m(const ChannelParams& cp) {
    return 4.0 * cp.tx_height_m * cp.rx_height_m / cp.wavelength_m();
}

double basic_pathloss_db(const ChannelParams& cp) {
    const double lam = cp.wavelength_m();
    return std::fabs(20.0 * std::log10(lam * lam / (8.0 * M_PI * cp.tx_height_m * cp.rx_height_m)));
}

double pathloss_db(double d_m, const ChannelParams& cp) {
    if (d_m <= 0.0) throw std::domain_error("pathloss_db: distance must be positive");
    const double rbp = breakpoint_distance_m(cp);
    const double lbp = basic_pathloss_db(cp);
    const double slope = d_m <= rbp ? 20.0 : 40.0;
    return lbp + 6.0 + slope * std::log10(d_m / rbp);
}

double noise_power_mw(double psd_dbm_hz, double bandwidth_hz) {
    if (bandwidth_hz <= 0.0) throw std::domain_error("noise_power_mw: bandwidth must be positive");
    return std::pow(10.0, (psd_dbm_hz + 10.0 * std::log10(bandwidth_hz)) / 10.0);
}

NetworkLayout generate_layout(int K, double field_len, double min_dist, double max_dist,
                              uint64_t seed) {
    if (K < 1) throw std::invalid_argument("generate_layout: K must be >= 1");
    if (!(0.0 < min_dist && min_dist < max_dist && max_dist < field_len))
        throw std::invalid_argument("generate_layout: need 0 < min_dist < max_dist < field_len");
    NetworkLayout layout;
    layout.K = K;
    layout.field_len = field_len;
    Rng rng(seed);
    constexpr int kMaxRetries = 10000;
    for (int i = 0; i < K; ++i) {
        const double tx_x = rng.uniform(0.0, field_len);
        const double tx_y = rng.uniform(0.0, field_len);
        bool placed = false;
        for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
            // receiver uniform over the [min_dist, max_dist] annulus around
            // the transmitter (area-uniform radius), direction uniform
            const double r = std::sqrt(rng.uniform(min_dist * min_dist, max_dist * max_dist));
            const double th = rng.uniform(0.0, 2.0 * M_PI);
            const double rx_x = tx_x + r * std::cos(th);
            const double rx_y = tx_y + r * std::sin(th);
            if (rx_x >= 0.0 && rx_x <= field_len && rx_y >= 0.0 && rx_y <= field_len) {
                layout.tx.push_back({tx_x, tx_y});
                layout.rx.push_back({rx_x, rx_y});
                placed = true;
                break;
            }
        }
        if (!placed)
            throw std::runtime_error("generate_layout: could not place receiver inside field");
    }
    return layout;
}

Matrix large_scale_gains(const NetworkLayout& layout, const ChannelParams& cp) {
    const int K = layout.K;
    Matrix g(K, K);
    for (int j = 0; j < K; ++j) {
        for (int i = 0; i < K; ++i) {
            const double dx = layout.tx[j][0] - layout.rx[i][0];
            const double dy = layout.tx[j][1] - layout.rx[i][1];
            const double d = std::sqrt(dx * dx + dy * dy);
            if (d <= 0.0)
                throw std::domain_error("large_scale_gains: coincident transmitter and receiver");
            g(j, i) = std::pow(10.0, (cp.antenna_gain_db - pathloss_db(d, cp)) / 10.0);
        }
    }
    return g;
}

ChannelEpisode evolve_episode(const Matrix& g_ls, double rho, int T, uint64_t seed) {
    if (rho < 0.0 || rho >= 1.0) throw std::domain_error("evolve_episode: rho must be in [0, 1)");
    if (T < 1) throw std::invalid_argument("evolve_episode: T must be >= 1");
    if (g_ls.rows != g_ls.cols) throw std::invalid_argument("evolve_episode: g_ls must be square");
    for (double g : g_ls.data)
        if (g <= 0.0) throw std::domain_error("evolve_episode: large-scale gains must be positive");
    ChannelEpisode ep;
    ep.K = g_ls.rows;
    ep.T = T;
    ep.rho = rho;
    ep.g_ls = g_ls;
    const size_t n = static_cast<size_t>(ep.K) * ep.K;
    Rng rng(seed);
    ep.h_ss.resize(T);
    ep.h_ss[0].resize(n);
    for (size_t k = 0; k < n; ++k) ep.h_ss[0][k] = rng.cgaussian(1.0);
    const double ivar = 1.0 - rho * rho;
    for (int t = 1; t < T; ++t) {
        ep.h_ss[t].resize(n);
        for (size_t k = 0; k < n; ++k)
            ep.h_ss[t][k] = rho * ep.h_ss[t - 1][k] + rng.cgaussian(ivar);
    }
    return ep;
}

Matrix ChannelEpisode::gains(int t) const {
    Matrix g(K, K);
    for (int j = 0; j < K; ++j)
        for (int i = 0; i < K; ++i) g(j, i) = gain(t, j, i);
    return g;
}

std::complex<double> ChannelEpisode::coeff(int t, int j, int i) const {
    return std::sqrt(g_ls(j, i)) * small_scale(t, j, i);
}

Dataset generate_dataset(const DatasetConfig& cfg) {
    Dataset ds;
    ds.config = cfg;
    ds.episodes.reserve(static_cast<size_t>(cfg.layouts));
    for (int idx = 0; idx < cfg.layouts; ++idx) {
        const uint64_t lseed = Rng::derive(cfg.seed, static_cast<uint64_t>(idx));
        NetworkLayout layout =
            generate_layout(cfg.K, cfg.field_len, cfg.min_dist, cfg.max_dist, lseed);
        const Matrix g = large_scale_gains(layout, cfg.channel);
        double rho = cfg.rho_fixed;
        if (cfg.rho_mode == RhoMode::uniform) {
            Rng rr(Rng::derive(lseed, 0x52484Full));  // independent of layout stream
            rho = rr.uniform();
        }
        ds.episodes.push_back(evolve_episode(g, rho, cfg.T, Rng::derive(lseed, 0x455056ull)));
    }
    return ds;
}

// -- binary dataset container ------------------------------------------------

namespace {

constexpr char kMagic[8] = {'A', 'I', 'R', 'G', 'N', 'N', 'D', '1'};

template <typename T>
void put(std::ofstream& f, const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& f) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!f) throw std::runtime_error("dataset: truncated file");
    return v;
}

}  // namespace

void Dataset::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("dataset: cannot open for writing: " + path);
    f.write(kMagic, sizeof(kMagic));
    put<uint32_t>(f, 1);  // version
    put<uint32_t>(f, static_cast<uint32_t>(config.K));
    put<double>(f, config.field_len);
    put<uint32_t>(f, static_cast<uint32_t>(config.T));
    put<uint32_t>(f, static_cast<uint32_t>(config.rho_mode));
    put<double>(f, config.rho_fixed);
    put<uint64_t>(f, config.seed);
    put<double>(f, config.min_dist);
    put<double>(f, config.max_dist);
    put<double>(f, config.channel.carrier_hz);
    put<double>(f, config.channel.tx_height_m);
    put<double>(f, config.channel.rx_height_m);
    put<double>(f, config.channel.antenna_gain_db);
    put<double>(f, config.channel.bandwidth_hz);
    put<double>(f, config.channel.noise_psd_dbm_hz);
    put<double>(f, config.channel.pmax_dbm);
    put<uint32_t>(f, static_cast<uint32_t>(episodes.size()));
    for (const ChannelEpisode& ep : episodes) {
        put<double>(f, ep.rho);
        f.write(reinterpret_cast<const char*>(ep.g_ls.data.data()),
                static_cast<std::streamsize>(ep.g_ls.data.size() * sizeof(double)));
        for (const auto& frame : ep.h_ss)
            f.write(reinterpret_cast<const char*>(frame.data()),
                    static_cast<std::streamsize>(frame.size() * sizeof(std::complex<double>)));
    }
    if (!f) throw std::runtime_error("dataset: write failed: " + path);
}

Dataset Dataset::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("dataset: cannot open: " + path);
    char magic[8];
    f.read(magic, sizeof(magic));
    if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("dataset: bad magic in " + path);
    const uint32_t version = get<uint32_t>(f);
    if (version != 1) throw std::runtime_error("dataset: unsupported version");
    Dataset ds;
    ds.config.K = static_cast<int>(get<uint32_t>(f));
    ds.config.field_len = get<double>(f);
    ds.config.T = static_cast<int>(get<uint32_t>(f));
    ds.config.rho_mode = static_cast<RhoMode>(get<uint32_t>(f));
    ds.config.rho_fixed = get<double>(f);
    ds.config.seed = get<uint64_t>(f);
    ds.config.min_dist = get<double>(f);
    ds.config.max_dist = get<double>(f);
    ds.config.channel.carrier_hz = get<double>(f);
    ds.config.channel.tx_height_m = get<double>(f);
    ds.config.channel.rx_height_m = get<double>(f);
    ds.config.channel.antenna_gain_db = get<double>(f);
    ds.config.channel.bandwidth_hz = get<double>(f);
    ds.config.channel.noise_psd_dbm_hz = get<double>(f);
    ds.config.channel.pmax_dbm = get<double>(f);
    const uint32_t count = get<uint32_t>(f);
    const int K = ds.config.K;
    const size_t n = static_cast<size_t>(K) * K;
    ds.episodes.resize(count);
    for (ChannelEpisode& ep : ds.episodes) {
        ep.K = K;
        ep.T = ds.config.T;
        ep.rho = get<double>(f);
        ep.g_ls = Matrix(K, K);
        f.read(reinterpret_cast<char*>(ep.g_ls.data.data()),
               static_cast<std::streamsize>(n * sizeof(double)));
        ep.h_ss.resize(static_cast<size_t>(ep.T));
        for (auto& frame : ep.h_ss) {
            frame.resize(n);
            f.read(reinterpret_cast<char*>(frame.data()),
                   static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
        }
        if (!f) throw std::runtime_error("dataset: truncated file: " + path);
    }
    return ds;
}

}  // namespace airgnn::netgen
