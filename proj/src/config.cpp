#include "airgnn/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace airgnn::config {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw std::runtime_error("config: line " + std::to_string(line) + ": " + what);
}

double to_double(const std::string& v, int line) {
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) fail(line, "trailing characters in number '" + v + "'");
        return x;
    } catch (const std::invalid_argument&) {
        fail(line, "expected a number, got '" + v + "'");
    } catch (const std::out_of_range&) {
        fail(line, "number out of range: '" + v + "'");
    }
}

long long to_int(const std::string& v, int line) {
    try {
        size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) fail(line, "trailing characters in integer '" + v + "'");
        return x;
    } catch (const std::invalid_argument&) {
        fail(line, "expected an integer, got '" + v + "'");
    } catch (const std::out_of_range&) {
        fail(line, "integer out of range: '" + v + "'");
    }
}

void apply_channel(RunConfig& c, const std::string& k, const std::string& v, int line) {
    auto& d = c.data;
    auto& ch = d.channel;
    if (k == "pairs") d.K = static_cast<int>(to_int(v, line));
    else if (k == "field_len_m") d.field_len = to_double(v, line);
    else if (k == "frames") d.T = static_cast<int>(to_int(v, line));
    else if (k == "layouts") d.layouts = static_cast<int>(to_int(v, line));
    else if (k == "min_dist_m") d.min_dist = to_double(v, line);
    else if (k == "max_dist_m") d.max_dist = to_double(v, line);
    else if (k == "rho_mode") {
        if (v == "uniform") d.rho_mode = netgen::RhoMode::uniform;
        else if (v == "fixed") d.rho_mode = netgen::RhoMode::fixed;
        else fail(line, "rho_mode must be 'uniform' or 'fixed', got '" + v + "'");
    } else if (k == "rho") d.rho_fixed = to_double(v, line);
    else if (k == "seed") d.seed = static_cast<uint64_t>(to_int(v, line));
    else if (k == "carrier_hz") ch.carrier_hz = to_double(v, line);
    else if (k == "tx_height_m") ch.tx_height_m = to_double(v, line);
    else if (k == "rx_height_m") ch.rx_height_m = to_double(v, line);
    else if (k == "antenna_gain_db") ch.antenna_gain_db = to_double(v, line);
    else if (k == "bandwidth_hz") ch.bandwidth_hz = to_double(v, line);
    else if (k == "noise_psd_dbm_hz") ch.noise_psd_dbm_hz = to_double(v, line);
    else if (k == "pmax_dbm") ch.pmax_dbm = to_double(v, line);
    else fail(line, "unknown key '" + k + "' in [channel]");
}

void apply_model(RunConfig& c, const std::string& k, const std::string& v, int line) {
    if (k == "kind") {
        try {
            c.kind = gnn::policy_kind_from_name(v);
        } catch (const std::exception&) {
            fail(line, "unknown model kind '" + v + "'");
        }
    } else if (k == "layers") c.layers = static_cast<int>(to_int(v, line));
    else fail(line, "unknown key '" + k + "' in [model]");
}

void apply_train(RunConfig& c, const std::string& k, const std::string& v, int line) {
    auto& t = c.train;
    if (k == "batch_size") t.batch_size = static_cast<int>(to_int(v, line));
    else if (k == "iterations") t.iterations = static_cast<int>(to_int(v, line));
    else if (k == "lr") t.initial_lr = to_double(v, line);
    else if (k == "lr_decay") t.lr_decay = to_double(v, line);
    else if (k == "decay_interval") t.decay_interval = static_cast<int>(to_int(v, line));
    else if (k == "seed") t.seed = static_cast<uint64_t>(to_int(v, line));
    else if (k == "val_fraction") t.val_fraction = to_double(v, line);
    else if (k == "curve_interval") t.curve_interval = static_cast<int>(to_int(v, line));
    else if (k == "grad_clip") t.grad_clip_norm = to_double(v, line);
    else if (k == "threads") t.threads = static_cast<int>(to_int(v, line));
    else fail(line, "unknown key '" + k + "' in [train]");
}

void apply_overhead(RunConfig& c, const std::string& k, const std::string& v, int line) {
    auto& o = c.overhead;
    if (k == "delta_csi") o.delta_csi = static_cast<int>(to_int(v, line));
    else if (k == "delta_mp") o.delta_mp = static_cast<int>(to_int(v, line));
    else if (k == "frame_symbols") o.ns = static_cast<int>(to_int(v, line));
    else fail(line, "unknown key '" + k + "' in [overhead]");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const size_t hash = raw.find_first_of("#;");
        const std::string stripped = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') fail(line, "unterminated section header");
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section != "channel" && section != "model" && section != "train" &&
                section != "overhead")
                fail(line, "unknown section [" + section + "]");
            continue;
        }
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) fail(line, "empty key");
        if (section.empty()) fail(line, "key '" + key + "' outside any section");
        if (section == "channel") apply_channel(cfg, key, value, line);
        else if (section == "model") apply_model(cfg, key, value, line);
        else if (section == "train") apply_train(cfg, key, value, line);
        else apply_overhead(cfg, key, value, line);
    }
    if (cfg.kind == gnn::PolicyKind::air_mprnn) cfg.layers = 1;
    cfg.overhead.layers = cfg.layers;
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace airgnn::config
