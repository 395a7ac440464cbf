// Deterministic random numbers.  Results are reproducible for a fixed seed
// within one build of the project; the Gaussian sampling algorithm is the
// standard library's, so cross-toolchain reproducibility is statistical only.
#pragma once

#include <cstdint>
#include <random>

namespace pxplab {

// SplitMix64 mixing step, used to derive independent per-task seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for task `index` derived from a master seed; distinct indices give
// statistically independent streams.
inline std::uint64_t task_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x51ed270692c3bbe7ULL));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double gaussian() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::uint64_t bits() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace pxplab
