#include "quico/rng.hpp"

#include <cstring>

#include "quico/hash.hpp"

namespace quico {

static uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(uint64_t seed) {
  uint64_t x = seed;
  for (auto& w : s_) w = splitmix64(x);
}

Rng Rng::stream(const std::string& label, uint64_t salt) const {
  Bytes buf;
  buf.reserve(32 + label.size() + 8);
  for (auto w : s_) {
    for (int shift = 56; shift >= 0; shift -= 8) buf.push_back(static_cast<uint8_t>(w >> shift));
  }
  buf.insert(buf.end(), label.begin(), label.end());
  for (int shift = 56; shift >= 0; shift -= 8) buf.push_back(static_cast<uint8_t>(salt >> shift));
  Hash32 h = sha3_256(buf);
  Rng out;
  std::memcpy(out.s_, h.data(), sizeof(out.s_));
  // all-zero state is the one invalid xoshiro state
  if ((out.s_[0] | out.s_[1] | out.s_[2] | out.s_[3]) == 0) out.s_[0] = 1;
  return out;
}

static inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

uint64_t Rng::next() {
  uint64_t result = rotl(s_[1] * 5, 7) * 9;
  uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  return lo + static_cast<int64_t>(next() % span);
}

double Rng::normal(double mean, double sigma) {
  double u1 = uniform01();
  double u2 = uniform01();
  if (u1 < 1e-300) u1 = 1e-300;
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  return mean + sigma * z;
}

double Rng::truncated_normal(double mean, double sigma, double lo, double hi) {
  if (sigma <= 0.0) return std::min(std::max(mean, lo), hi);
  for (int i = 0; i < 64; ++i) {
    double v = normal(mean, sigma);
    if (v >= lo && v <= hi) return v;
  }
  return std::min(std::max(mean, lo), hi);
}

Seed32 Rng::seed_bytes() {
  Seed32 out;
  for (int i = 0; i < 4; ++i) {
    uint64_t w = next();
    for (int j = 0; j < 8; ++j) out[i * 8 + j] = static_cast<uint8_t>(w >> (56 - 8 * j));
  }
  return out;
}

}  // namespace quico
