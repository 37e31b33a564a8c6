#include "causalboot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace causalboot {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(SeedSpec seed) {
  std::uint64_t x = seed.root_seed + 0x9E3779B97F4A7C15ULL * seed.stream_id;
  s_[0] = splitmix64(x);
  s_[1] = splitmix64(x);
  s_[2] = splitmix64(x);
  s_[3] = splitmix64(x);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // forbidden state
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("bound must be positive");
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (lo < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * bound;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double v1, v2, s;
  do {
    v1 = 2.0 * uniform01() - 1.0;
    v2 = 2.0 * uniform01() - 1.0;
    s = v1 * v1 + v2 * v2;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v2 * f;
  has_spare_ = true;
  return v1 * f;
}

namespace detail {

void partial_shuffle(Rng& rng, std::vector<int>& idx, int n, int k) {
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
}

}  // namespace detail

std::vector<int> sample_without_replacement(int pop_size, int k, SeedSpec seed) {
  if (pop_size < 0 || k < 0 || k > pop_size) {
    throw std::invalid_argument("sample size exceeds population");
  }
  std::vector<int> idx(pop_size);
  for (int i = 0; i < pop_size; ++i) idx[i] = i;
  Rng rng(seed);
  detail::partial_shuffle(rng, idx, pop_size, k);
  std::vector<int> out(idx.begin(), idx.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint8_t> complete_randomization(int n, int n1, SeedSpec seed) {
  if (n < 2 || n1 <= 0 || n1 >= n) {
    throw std::invalid_argument("treated count must satisfy 0 < n1 < n");
  }
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  detail::partial_shuffle(rng, idx, n, n1);
  std::vector<std::uint8_t> w(n, 0);
  for (int i = 0; i < n1; ++i) w[idx[i]] = 1;
  return w;
}

std::vector<std::uint8_t> bernoulli_assignment(int n, double prop, SeedSpec seed) {
  if (n < 1) throw std::invalid_argument("assignment needs at least one unit");
  if (!(prop > 0.0 && prop < 1.0)) {
    throw std::invalid_argument("treatment proportion must lie in (0,1)");
  }
  Rng rng(seed);
  std::vector<std::uint8_t> w(n);
  for (int i = 0; i < n; ++i) w[i] = rng.uniform01() < prop ? 1 : 0;
  return w;
}

}  // namespace causalboot
