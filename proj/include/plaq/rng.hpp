#pragma once

#include <cstdint>

namespace plaq {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so parallel chains never share state.
//
//   word(seed, stream, k) = SplitMix64( SplitMix64(seed ^ GOLDEN*stream) + GOLDEN*k )
//
// SplitMix64 is the finalizer from Steele, Lea & Flood (2014). Pinned as
// rng-v1; changing it changes every seeded result in the project.
namespace rng {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline uint64_t splitmix64(uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t word(uint64_t seed, uint64_t stream, uint64_t counter) {
    return splitmix64(splitmix64(seed ^ (kGolden * (stream + 1))) + kGolden * counter);
}

inline double uniform01(uint64_t seed, uint64_t stream, uint64_t counter) {
    return double(word(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// Stateful view over one stream.
class Stream {
  public:
    Stream(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}
    uint64_t next_word() { return word(seed_, stream_, counter_++); }
    double next_uniform() { return double(next_word() >> 11) * 0x1.0p-53; }
    int8_t next_sign() { return (next_word() & 1) ? int8_t(1) : int8_t(-1); }
    // true with probability p
    bool next_bernoulli(double p) { return next_uniform() < p; }
    uint64_t next_below(uint64_t n) { return next_word() % n; }

  private:
    uint64_t seed_;
    uint64_t stream_;
    uint64_t counter_ = 0;
};

}  // namespace rng
}  // namespace plaq
