#pragma once

#include <cstdint>

namespace davlab {

/*
 * Counter-based pseudo-random generator.
 *
 * Every draw is a pure function of (seed, stream, counter), so randomized
 * procedures can hand out independent streams to logical sub-tasks (stages,
 * cover steps, retry rounds) and produce identical results no matter how the
 * work is scheduled across threads.  The mixer is the splitmix64 finalizer,
 * which is more than adequate statistically for randomized search.
 */
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Raw 64-bit draw for (stream, counter).
    std::uint64_t at(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t h = mix(seed_ ^ mix(stream ^ 0x8f1bbcdcbfa53e0bULL));
        return mix(h + counter * 0x9e3779b97f4a7c15ULL);
    }

    // Uniform draw in [0, bound).  Modulo bias is negligible for bound << 2^64
    // and keeps the mapping platform-independent.
    std::uint64_t uniform(std::uint64_t stream, std::uint64_t counter,
                          std::uint64_t bound) const {
        return at(stream, counter) % bound;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

// Stream identifiers used by the construction pipeline.  Packing the stage and
// step into the stream id keeps draws for different cover steps independent.
inline std::uint64_t cover_stream(std::uint32_t stage, std::uint64_t step) {
    return (static_cast<std::uint64_t>(stage) << 48) ^ (step << 8) ^ 0x1ULL;
}

inline std::uint64_t sample_stream(std::uint32_t stage, std::uint64_t step) {
    return (static_cast<std::uint64_t>(stage) << 48) ^ (step << 8) ^ 0x2ULL;
}

inline std::uint64_t verify_stream(std::uint32_t stage, std::uint64_t step) {
    return (static_cast<std::uint64_t>(stage) << 48) ^ (step << 8) ^ 0x3ULL;
}

} // namespace davlab
