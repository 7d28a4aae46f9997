#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace progmod {

// All stochastic routines draw from streams derived as derive_seed(seed, i),
// one stream per independent unit of work (resample, restart, row, walk).
// Results are therefore identical no matter how the units are scheduled.
uint64_t derive_seed(uint64_t seed, uint64_t stream);

// mt19937_64 output is fixed by the standard; the distribution helpers are
// hand-rolled because std::uniform_*_distribution is not portable across
// library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // [0,1), 53 usable bits
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // unbiased integer in [0,n)
  std::size_t below(std::size_t n);

  bool bernoulli(double p) { return uniform01() < p; }

  // k distinct values from [0,n), ascending
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace progmod
