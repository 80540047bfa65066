#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace ifm {

struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

/// Independent random stream keyed by (seed, stream_id).
///
/// Backed by a 64-bit Mersenne Twister whose state is expanded from all four
/// 32-bit halves of the key through std::seed_seq. One stream per Monte Carlo
/// repetition; streams never share state.
class RandomStream {
public:
    explicit RandomStream(RngSeed key);

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Final measurement outcome of one IFM run.
enum class Detection : std::uint8_t { reference = 0, sample = 1, lost = 2 };

bool sample_bernoulli(RandomStream& stream, double p);

/// Categorical draw over (P_R, P_S, P_L). Throws std::invalid_argument for
/// negative entries or a sum further than 1e-9 from 1.
Detection sample_categorical3(RandomStream& stream, const std::array<double, 3>& probs);

std::uint64_t sample_poisson(RandomStream& stream, double mean);

}  // namespace ifm
