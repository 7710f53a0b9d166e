#include "mcfar/rng.hpp"

#include <cmath>
#include <numbers>

namespace mcfar {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
    // decorrelate streams: fold the stream id through the mixer first
    std::uint64_t sid = stream_id;
    std::uint64_t state =
        master_seed ^ (splitmix64(sid) + 0x9E3779B97F4A7C15ULL * (stream_id + 1));
    for (auto& w : s_) w = splitmix64(state);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform() {
    // 53-bit mantissa; map to (0, 1]
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex RngStream::complex_normal() {
    // |z|^2 ~ Exp(1), uniform phase
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));
    return Complex(r * std::cos(2.0 * std::numbers::pi * u2),
                   r * std::sin(2.0 * std::numbers::pi * u2));
}

CVector RngStream::complex_normal_vector(int n) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v[i] = complex_normal();
    return v;
}

double RngStream::gamma(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidInput("gamma: alpha, beta must be > 0");
    if (alpha < 1.0) {
        const double boost = std::pow(uniform(), 1.0 / alpha);
        return gamma(alpha + 1.0, beta) * boost;
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * beta;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * beta;
    }
}

}  // namespace mcfar
