#pragma once

#include <cstdint>

#include "mcfar/types.hpp"

namespace mcfar {

/// Deterministic random stream: identical (master_seed, stream_id) pairs
/// reproduce identical draws regardless of execution order or worker count.
/// xoshiro256++ seeded through splitmix64; all variates are derived from
/// uniform doubles so results do not depend on the platform's libstdc++.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    /// Uniform in (0, 1] (never exactly 0, so logs are safe).
    double uniform();

    /// Standard real normal N(0, 1) via Box-Muller.
    double normal();

    /// Circularly-symmetric complex normal with E|z|^2 = 1.
    Complex complex_normal();

    /// Vector of iid complex_normal() entries.
    CVector complex_normal_vector(int n);

    /// Gamma(shape alpha, scale beta): Marsaglia-Tsang squeeze for alpha >= 1,
    /// the U^{1/alpha} boost below 1.
    double gamma(double alpha, double beta);

private:
    std::uint64_t s_[4];
};

}  // namespace mcfar
