#include "airgnn/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace airgnn::checkpoint {

namespace {

constexpr char kMagic[8] = {'A', 'I', 'R', 'G', 'N', 'N', 'C', '1'};

template <typename T>
void put(std::ofstream& f, const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& f) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!f) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

void put_mlp(std::ofstream& f, const std::string& name, const diffmath::MlpParams& m) {
    put<uint32_t>(f, static_cast<uint32_t>(name.size()));
    f.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<uint32_t>(f, m.output_activation == diffmath::OutputActivation::sigmoid ? 1u : 0u);
    put<uint32_t>(f, static_cast<uint32_t>(m.dims.size()));
    for (int d : m.dims) put<uint32_t>(f, static_cast<uint32_t>(d));
    for (size_t l = 0; l < m.weights.size(); ++l) {
        f.write(reinterpret_cast<const char*>(m.weights[l].data.data()),
                static_cast<std::streamsize>(m.weights[l].data.size() * sizeof(double)));
        f.write(reinterpret_cast<const char*>(m.biases[l].data.data()),
                static_cast<std::streamsize>(m.biases[l].data.size() * sizeof(double)));
    }
}

diffmath::MlpParams get_mlp(std::ifstream& f, const std::string& expected_name) {
    const uint32_t nlen = get<uint32_t>(f);
    std::string name(nlen, '\0');
    f.read(name.data(), nlen);
    if (!f || name != expected_name)
        throw std::runtime_error("checkpoint: unexpected MLP name '" + name + "'");
    const uint32_t act = get<uint32_t>(f);
    const uint32_t ndims = get<uint32_t>(f);
    std::vector<int> dims(ndims);
    for (auto& d : dims) d = static_cast<int>(get<uint32_t>(f));
    diffmath::MlpParams m = diffmath::MlpParams::zeros(
        dims, act ? diffmath::OutputActivation::sigmoid : diffmath::OutputActivation::linear);
    for (size_t l = 0; l < m.weights.size(); ++l) {
        f.read(reinterpret_cast<char*>(m.weights[l].data.data()),
               static_cast<std::streamsize>(m.weights[l].data.size() * sizeof(double)));
        f.read(reinterpret_cast<char*>(m.biases[l].data.data()),
               static_cast<std::streamsize>(m.biases[l].data.size() * sizeof(double)));
    }
    if (!f) throw std::runtime_error("checkpoint: truncated file");
    return m;
}

}  // namespace

void save(const gnn::PolicyModel& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
    f.write(kMagic, sizeof(kMagic));
    put<uint32_t>(f, 1);  // version
    put<uint32_t>(f, static_cast<uint32_t>(model.kind));
    put<uint32_t>(f, static_cast<uint32_t>(model.layers));
    put<uint32_t>(f, static_cast<uint32_t>(model.embed_dim));
    put<double>(f, model.stats.direct_mean);
    put<double>(f, model.stats.direct_std);
    put<double>(f, model.stats.interf_mean);
    put<double>(f, model.stats.interf_std);
    put_mlp(f, "message", model.message);
    put_mlp(f, "update", model.update);
    put_mlp(f, "output", model.output);
    if (!f) throw std::runtime_error("checkpoint: write failed: " + path);
}

gnn::PolicyModel load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot open: " + path);
    char magic[8];
    f.read(magic, sizeof(magic));
    if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    if (get<uint32_t>(f) != 1) throw std::runtime_error("checkpoint: unsupported version");
    gnn::PolicyModel m;
    m.kind = static_cast<gnn::PolicyKind>(get<uint32_t>(f));
    m.layers = static_cast<int>(get<uint32_t>(f));
    m.embed_dim = static_cast<int>(get<uint32_t>(f));
    m.stats.direct_mean = get<double>(f);
    m.stats.direct_std = get<double>(f);
    m.stats.interf_mean = get<double>(f);
    m.stats.interf_std = get<double>(f);
    m.message = get_mlp(f, "message");
    m.update = get_mlp(f, "update");
    m.output = get_mlp(f, "output");
    return m;
}

}  // namespace airgnn::checkpoint
