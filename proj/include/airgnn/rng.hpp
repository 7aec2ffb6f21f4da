#pragma once

#include <complex>
#include <cstdint>

namespace airgnn {

// Deterministic generator with a portable output path: uniforms are built
// directly from the raw 64-bit stream, normals via Box-Muller, so identical
// seeds give identical draws on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {
        // warm up, xorshift-style generators start poorly from small seeds
        for (int i = 0; i < 4; ++i) next();
    }

    uint64_t next() {
        // splitmix64
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal
    double gaussian();

    // circularly-symmetric complex Gaussian CN(0, var)
    std::complex<double> cgaussian(double var);

    // per-index stream derivation so items can be generated independently
    static uint64_t derive(uint64_t master, uint64_t index);

private:
    uint64_t state_;
};

}  // namespace airgnn
