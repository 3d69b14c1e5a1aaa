#pragma once

// Seeded property sweeps over the flow equations and the two lemmas behind
// the reduction. Results depend only on (samples, seed).

#include <cstdint>
#include <optional>
#include <string>

namespace acstar {

/// SplitMix64 (Steele, Lea, Flood). Doubles use the top 53 bits.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

 private:
  std::uint64_t state_;
};

struct SweepResult {
  std::string name;
  std::int64_t samples = 0;
  std::int64_t failures = 0;
  /// Smallest slack to the criterion's bound over all samples (negative on failure).
  double worst_margin = 0.0;
  std::optional<std::string> counterexample;  // first failure, human readable

  bool passed() const { return failures == 0; }
};

/// gap <= 1e-9 (1 + b^2 + g^2), and |gap| within that bound exactly when
/// delta is within 1e-9 of 0 or delta_max.
SweepResult sweep_lemma1(std::int64_t samples, std::uint64_t seed);

/// Sign implication of the generator real flow over valid reduction parameters.
SweepResult sweep_lemma2(std::int64_t samples, std::uint64_t seed);

/// |p^2 + q^2 - 2 (g^2 + b^2)(1 - cos delta)| <= 1e-9 (1 + g^2 + b^2).
SweepResult sweep_apparent_power(std::int64_t samples, std::uint64_t seed);

/// |delta_max_from_capacity(capacity_from_delta_max(delta)) - delta| <= 1e-12.
SweepResult sweep_capacity_roundtrip(std::int64_t samples, std::uint64_t seed);

}  // namespace acstar
