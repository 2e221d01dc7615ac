#pragma once

#include <cmath>
#include <cstdint>

namespace campussim {

// Counter-based RNG. Every random decision in the simulator draws from a
// substream keyed by (seed, purpose, entity, day), so results do not depend
// on evaluation order or thread count. std:: distributions are avoided on
// purpose: their sequences are implementation-defined.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix_key(uint64_t a, uint64_t b) {
    return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)));
}

// Stream purposes, kept distinct so substreams never collide.
enum class StreamId : uint64_t {
    Setup = 1,        // population construction, attribute sampling
    DayResolve = 2,   // end-of-day infection draws, keyed (agent, day)
    FreeWalk = 3,     // free-walk itinerary sampling, keyed (agent, day)
    Placement = 4,    // initial-case placement
    Jitter = 5,       // daily departure-time jitter, keyed (agent, day*64+leg)
};

class Substream {
public:
    Substream(uint64_t seed, StreamId id, uint64_t key1 = 0, uint64_t key2 = 0)
        : state_(mix_key(mix_key(mix_key(seed, static_cast<uint64_t>(id)), key1), key2)) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64(state_);
    }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    uint64_t uniform_index(uint64_t n) {
        return n == 0 ? 0 : next_u64() % n;
    }

    // Box-Muller; one value per call, the pair partner is discarded to keep
    // the draw count per decision fixed.
    double normal(double mean, double stddev) {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return mean + stddev * z;
    }

    // Rejection-sampled truncated normal. With stddev 0 collapses to the mean.
    double truncated_normal(double mean, double stddev, double lo, double hi) {
        if (stddev <= 0.0) return mean < lo ? lo : (mean > hi ? hi : mean);
        for (int i = 0; i < 256; ++i) {
            double v = normal(mean, stddev);
            if (v >= lo && v <= hi) return v;
        }
        return mean < lo ? lo : (mean > hi ? hi : mean);
    }

private:
    uint64_t state_;
};

}  // namespace campussim
