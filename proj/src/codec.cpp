#include "quico/codec.hpp"

#include <bit>

namespace quico {

void Encoder::u32(uint32_t v) {
  out_.push_back(static_cast<uint8_t>(v >> 24));
  out_.push_back(static_cast<uint8_t>(v >> 16));
  out_.push_back(static_cast<uint8_t>(v >> 8));
  out_.push_back(static_cast<uint8_t>(v));
}

void Encoder::u64(uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<uint8_t>(v >> shift));
  }
}

void Encoder::f64(double v) {
  u64(std::bit_cast<uint64_t>(v));
}

void Encoder::bytes(BytesView v) {
  u32(static_cast<uint32_t>(v.size()));
  raw(v);
}

void Decoder::need(size_t n) const {
  if (pos_ + n > in_.size()) throw Error("CodecError", "input truncated");
}

uint8_t Decoder::u8() {
  need(1);
  return in_[pos_++];
}

uint32_t Decoder::u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

uint64_t Decoder::u64() {
  need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

double Decoder::f64() {
  return std::bit_cast<double>(u64());
}

Bytes Decoder::bytes() {
  uint32_t n = u32();
  need(n);
  Bytes out(in_.begin() + pos_, in_.begin() + pos_ + n);
  pos_ += n;
  return out;
}

Hash32 Decoder::hash() {
  need(32);
  Hash32 out;
  std::memcpy(out.data(), in_.data() + pos_, 32);
  pos_ += 32;
  return out;
}

void Decoder::expect_end() const {
  if (!exhausted()) throw Error("CodecError", "trailing bytes after value");
}

}  // namespace quico
