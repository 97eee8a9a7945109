#pragma once

#include <cstdint>
#include <random>

namespace gwas {

// Mersenne Twister (mt19937_64) with hand-written transforms so that draws are
// bit-stable across standard libraries (std:: distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer on [0, bound), bound > 0; rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  // 1 + Geometric(1/mean_minus_one): number of trials to first success.
  std::uint64_t geometric_at_least_one(double mean);

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed for one replicate: (base, replicate) mixed by splitmix64.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replicate_id);

}  // namespace gwas
