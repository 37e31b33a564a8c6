#pragma once

#include <cstdint>
#include <vector>

namespace causalboot {

// Identifies one reproducible random stream.  A (root_seed, stream_id) pair
// fully determines every draw taken from the stream, independently of
// platform, thread count, or what other streams are consumed.  Parallel
// work hands each logical replication its own stream_id, so results never
// depend on scheduling order.
struct SeedSpec {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_id = 0;

  SeedSpec sub(std::uint64_t offset) const {
    return SeedSpec{root_seed, stream_id + offset};
  }
};

// Counter-seeded xoshiro256**.  The state is expanded from
// root_seed + stream_id * 0x9E3779B97F4A7C15 through splitmix64, which is
// the generator author's recommended seeding and keeps distinct stream ids
// statistically independent.  Gaussians use the Marsaglia polar method
// (sqrt/log only) so the floating-point path has no trig dependence.
class Rng {
 public:
  explicit Rng(SeedSpec seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53 random bits.
  double uniform01();

  // Uniform integer on [0, bound), bound >= 1, via Lemire's unbiased
  // multiply-and-reject.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal deviate.
  double normal();

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Simple random sample of k distinct indices from {0, ..., pop_size-1},
// returned in increasing order.  Every k-subset has probability
// 1 / C(pop_size, k).
std::vector<int> sample_without_replacement(int pop_size, int k, SeedSpec seed);

// Complete randomization: a 0/1 vector of length n with exactly n1 ones,
// uniform over all C(n, n1) configurations.  Requires 0 < n1 < n.
std::vector<std::uint8_t> complete_randomization(int n, int n1, SeedSpec seed);

// Independent Bernoulli(prop) assignment for n units.  Requires
// 0 < prop < 1.
std::vector<std::uint8_t> bernoulli_assignment(int n, double prop, SeedSpec seed);

namespace detail {

// In-place partial Fisher-Yates: after the call, idx[0..k) holds a uniform
// k-subset of {0, ..., n-1} (unordered).  idx must have size n and contain
// a permutation of 0..n-1; the call leaves it a permutation.
void partial_shuffle(Rng& rng, std::vector<int>& idx, int n, int k);

}  // namespace detail

}  // namespace causalboot
