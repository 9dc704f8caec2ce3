#ifndef CVSENSE_RNG_HPP
#define CVSENSE_RNG_HPP

#include <cstdint>
#include <random>

namespace cvsense {

// splitmix64; used only to expand (seed, stream) pairs into engine state.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seeded random stream. Identical (seed, stream_id) reproduces identical
// sequences; distinct stream ids are independent for practical purposes and
// safe to hand out to concurrent tasks.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_(stream_id) {
        std::seed_seq sq{mix64(seed), mix64(seed ^ 0x5851f42d4c957f2dULL),
                         mix64(stream_id ^ 0xda3e39cb94b95bdbULL), mix64(stream_id)};
        engine_.seed(sq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    // zero-mean Gaussian, standard deviation sigma
    double gaussian(double sigma) { return sigma * normal_(engine_); }

    // uniform in [0, 1)
    double uniform() { return unit_(engine_); }

    std::uint64_t raw() { return engine_(); }

    // independent stream derived from this one; deterministic in (seed, id, k)
    RngStream substream(std::uint64_t k) const {
        return RngStream(seed_, mix64(stream_ * 0x100000001b3ULL + k + 1));
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace cvsense

#endif
