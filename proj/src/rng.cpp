#include "owpn/rng.hpp"

#include <cmath>

namespace owpn {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(RngSeed seed) {
  // Mix the stream id into the splitmix chain so stream 0 and seed 0 do
  // not collapse onto the same state.
  std::uint64_t x = seed.seed ^ (0x9e3779b97f4a7c15ull * (seed.stream + 1));
  for (auto& word : state_) word = splitmix64(x);
  // xoshiro256++ must not start from the all-zero state.
  bool all_zero = true;
  for (auto word : state_) all_zero &= (word == 0);
  if (all_zero) state_[0] = 0x8f2b3e1d5c4a7961ull;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double RngStream::exponential(double mean) {
  // uniform01() < 1, so the argument of log stays in (0, 1].
  return -mean * std::log1p(-uniform01());
}

}  // namespace owpn
