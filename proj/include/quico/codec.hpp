#pragma once

#include <cstring>
#include <string>

#include "quico/bytes.hpp"

namespace quico {

// Canonical byte format shared by hashes, signatures and golden files:
// fixed field order, fixed-width big-endian integers, u32-length-prefixed
// byte strings and lists. Doubles travel as their IEEE-754 bit pattern.

class Encoder {
 public:
  void u8(uint8_t v) { out_.push_back(v); }
  void u32(uint32_t v);
  void u64(uint64_t v);
  void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
  void f64(double v);
  void bytes(BytesView v);
  void raw(BytesView v) { out_.insert(out_.end(), v.begin(), v.end()); }
  void hash(const Hash32& h) { raw(BytesView{h.data(), h.size()}); }

  Bytes take() { return std::move(out_); }
  const Bytes& buffer() const { return out_; }

 private:
  Bytes out_;
};

class Decoder {
 public:
  explicit Decoder(BytesView in) : in_(in) {}

  uint8_t u8();
  uint32_t u32();
  uint64_t u64();
  int64_t i64() { return static_cast<int64_t>(u64()); }
  double f64();
  Bytes bytes();
  Hash32 hash();

  bool exhausted() const { return pos_ == in_.size(); }
  /// Throws Error("CodecError") unless all input was consumed.
  void expect_end() const;

 private:
  void need(size_t n) const;
  BytesView in_;
  size_t pos_ = 0;
};

}  // namespace quico
