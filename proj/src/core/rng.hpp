#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace distex {

inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and a list of salts
// (sample index, step, repeat...). Stable across platforms and threads.
inline uint64_t mix_seed(std::initializer_list<uint64_t> parts) {
  uint64_t state = 0x6a09e667f3bcc908ULL;
  for (uint64_t p : parts) {
    state ^= p + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
    splitmix64(state);
  }
  return splitmix64(state);
}

// mt19937_64 with hand-rolled output transforms. The engine sequence is
// pinned by the standard; the distributions in <random> are not, so uniform
// and normal draws are produced here to keep results reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n)
  int uniform_int(int n) { return static_cast<int>(uniform() * n); }

  // standard normal via Box-Muller
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      const int j = uniform_int(i + 1);
      std::swap(v[i], v[static_cast<size_t>(j)]);
    }
  }

  uint64_t next() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace distex
