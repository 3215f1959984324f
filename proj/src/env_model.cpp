#include "quico/env_model.hpp"

#include <cmath>

namespace quico {

double distance(const Vec2& a, const Vec2& b) {
  double dx = a.x - b.x;
  double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

double EnvModel::field_at(const Vec2& pos) const {
  if (sinusoid_amplitude == 0.0) return base_value;
  double k = 2.0 * M_PI / spatial_period_km;
  return base_value + sinusoid_amplitude * std::sin(k * pos.x) * std::cos(k * pos.y);
}

double EnvModel::observe(const Vec2& pos, Rng& rng) const {
  double v = field_at(pos);
  if (noise_amplitude <= 0.0) return v;
  return v + rng.truncated_normal(0.0, noise_amplitude / 2.0, -noise_amplitude, noise_amplitude);
}

}  // namespace quico
