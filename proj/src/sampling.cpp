#include "ifm/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace ifm {

namespace {

std::mt19937_64 seeded_engine(RngSeed key) {
    std::seed_seq seq{static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32),
                      static_cast<std::uint32_t>(key.stream_id),
                      static_cast<std::uint32_t>(key.stream_id >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(RngSeed key) : engine_(seeded_engine(key)) {}

bool sample_bernoulli(RandomStream& stream, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("Bernoulli probability must lie in [0, 1]");
    return stream.uniform() < p;
}

Detection sample_categorical3(RandomStream& stream, const std::array<double, 3>& probs) {
    if (probs[0] < 0.0 || probs[1] < 0.0 || probs[2] < 0.0 ||
        std::abs(probs[0] + probs[1] + probs[2] - 1.0) > 1e-9) {
        throw std::invalid_argument("outcome probabilities must be non-negative and sum to 1");
    }
    const double u = stream.uniform();
    if (u < probs[0]) return Detection::reference;
    if (u < probs[0] + probs[1]) return Detection::sample;
    // Guards against round-off when P_L is exactly zero.
    if (probs[2] == 0.0) return probs[1] > 0.0 ? Detection::sample : Detection::reference;
    return Detection::lost;
}

std::uint64_t sample_poisson(RandomStream& stream, double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("Poisson mean must be >= 0");
    if (mean == 0.0) return 0;
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(stream.engine());
}

}  // namespace ifm
