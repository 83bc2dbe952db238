#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bhp {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic random stream. Draws are fully specified (engine is
// mt19937_64, all variates derived by explicit inversion), so results are
// bit-identical across platforms and independent of the standard library's
// distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

    // Independent stream derived from (master seed, stream id); streams for
    // distinct ids are statistically independent, so replicates can run
    // concurrently in any order.
    static Rng stream(std::uint64_t master_seed, std::uint64_t stream_id) {
        std::uint64_t s = master_seed;
        splitmix64(s);
        s ^= 0x5851f42d4c957f2dULL * (stream_id + 1);
        return Rng(splitmix64(s));
    }

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform on (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }

    // standard exponential by inversion
    double exponential() { return -std::log(uniform_pos()); }

    double exponential(double rate) { return exponential() / rate; }

    // index in [0, n)
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n));
    }

  private:
    static std::uint64_t mix_seed(std::uint64_t seed) {
        std::uint64_t s = seed;
        return splitmix64(s);
    }

    std::mt19937_64 engine_;
};

}  // namespace bhp
