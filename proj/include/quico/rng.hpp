#pragma once

#include <cmath>
#include <string>

#include "quico/bytes.hpp"

namespace quico {

/// Deterministic xoshiro256** stream. Sub-streams are derived by hashing a
/// label into the state, so independent parts of a simulation draw from
/// isolated sequences that depend only on (seed, label).
class Rng {
 public:
  explicit Rng(uint64_t seed);

  /// Independent sub-stream for `label` (+ numeric salt).
  Rng stream(const std::string& label, uint64_t salt = 0) const;

  uint64_t next();

  /// Uniform in [0, 1).
  double uniform01();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi] inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi);
  /// Normal via Box-Muller (two fresh draws every call).
  double normal(double mean = 0.0, double sigma = 1.0);
  /// Normal clamped by rejection to [lo, hi].
  double truncated_normal(double mean, double sigma, double lo, double hi);

  /// 32 deterministic bytes (for seal entropy and derived seeds).
  Seed32 seed_bytes();

 private:
  Rng() = default;
  uint64_t s_[4] = {};
};

}  // namespace quico
