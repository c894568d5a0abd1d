#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ens {

/// SplitMix64 finalizer; used only to derive well-separated seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent child stream identified by `salt`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose);

/// 64-bit Mersenne Twister (std::mt19937_64) seeded through SplitMix64.
///
/// Every experiment draws from named child streams of one master seed
/// (`Rng::stream(master, "design")`, `"labels"`, `"directions"`, ...) so
/// that adding draws to one purpose never perturbs another.
class Rng {
 public:
  using Engine = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}
  static Rng stream(std::uint64_t master, std::string_view purpose) {
    return Rng(derive_seed(master, purpose));
  }

  std::uint64_t seed() const { return seed_; }
  Engine& engine() { return engine_; }

  /// Uniform on [0, 1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  /// Uniform integer in [0, bound).
  std::int64_t below(std::int64_t bound) {
    return std::uniform_int_distribution<std::int64_t>(0, bound - 1)(engine_);
  }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  Engine engine_;
};

}  // namespace ens
