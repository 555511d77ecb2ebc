#pragma once

// Deterministic, splittable random numbers for disorder ensembles. Every
// realization owns a generator seeded from (base_seed, index), so results do
// not depend on which worker ran which realization.

#include <cstdint>
#include <random>

namespace ladder {

// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t child_seed(std::uint64_t base_seed, std::uint64_t index) {
    return splitmix64(splitmix64(base_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// mt19937_64 output is fixed by the standard; the mapping to [a, b] is done
// here rather than with std::uniform_real_distribution, whose algorithm is
// implementation-defined.
class UniformSource {
public:
    explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace ladder
