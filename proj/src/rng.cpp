#include "airgnn/rng.hpp"

#include <cmath>

namespace airgnn {

double Rng::gaussian() {
    // Box-Muller; draws two uniforms per normal, keeps the stream simple
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::complex<double> Rng::cgaussian(double var) {
    const double s = std::sqrt(var * 0.5);
    return {s * gaussian(), s * gaussian()};
}

uint64_t Rng::derive(uint64_t master, uint64_t index) {
    uint64_t z = master ^ (0x9E3779B97F4A7C15ull * (index + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace airgnn
