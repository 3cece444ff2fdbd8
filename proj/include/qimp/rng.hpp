#pragma once
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace qimp {

// Seeded, splittable RNG. Every stochastic operation takes one of these
// explicitly; identical seeds reproduce identical streams on a fixed toolchain.
class Rng {
 public:
  explicit Rng(uint64_t seed) : material_(mix(seed)), eng_(material_) {}

  // Independent child stream derived from this stream's seed material and a
  // tag. Does not advance the parent stream.
  Rng child(uint64_t tag) const { return Rng(material_ ^ mix(tag ^ 0xabcd1234u)); }
  Rng child(std::string_view tag) const { return child(fnv1a(tag)); }

  uint64_t u64() { return eng_(); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  uint64_t below(uint64_t n) { return std::uniform_int_distribution<uint64_t>(0, n - 1)(eng_); }
  long binomial(long n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    return std::binomial_distribution<long>(n, p)(eng_);
  }

  // Multinomial draw of `shots` samples over `probs` via a binomial chain;
  // negative entries are clipped, the rest renormalized.
  std::vector<long> multinomial(const std::vector<double>& probs, long shots) {
    std::vector<long> counts(probs.size(), 0);
    double rest = 0.0;
    for (double p : probs) rest += (p > 0.0 ? p : 0.0);
    long left = shots;
    for (size_t i = 0; i + 1 < probs.size() && left > 0; ++i) {
      double p = probs[i] > 0.0 ? probs[i] : 0.0;
      if (rest <= 0.0) break;
      long c = binomial(left, p / rest);
      counts[i] = c;
      left -= c;
      rest -= p;
    }
    if (!probs.empty()) counts.back() += left;
    return counts;
  }

  static uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  static uint64_t mix(uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  uint64_t material_;
  std::mt19937_64 eng_;
};

}  // namespace qimp
