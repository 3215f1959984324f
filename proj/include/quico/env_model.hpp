#pragma once

#include "quico/rng.hpp"
#include "quico/types.hpp"

namespace quico {

struct Vec2 {
  double x = 0.0;  // km
  double y = 0.0;  // km
};

double distance(const Vec2& a, const Vec2& b);

/// Scalar field the sensors measure: a constant base, optionally modulated by
/// a low-frequency spatial sinusoid. Per-sensor noise is a truncated normal
/// bounded by +-noise_amplitude, so honest readings stay inside a known band.
struct EnvModel {
  double base_value = 20.0;
  double sinusoid_amplitude = 0.0;   // 0 = constant field
  double spatial_period_km = 1.0;
  double noise_amplitude = 0.5;

  /// Noise-free field value at a position.
  double field_at(const Vec2& pos) const;

  /// One sensor observation: field value + bounded noise.
  double observe(const Vec2& pos, Rng& rng) const;
};

}  // namespace quico
