#include "quico/hash.hpp"

#include <openssl/evp.h>

#include <cstdio>

namespace quico {

std::string to_hex(BytesView data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

Bytes from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw Error("HexError", "odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw Error("HexError", "invalid hex digit");
  };
  Bytes out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<uint8_t>((nibble(hex[i]) << 4) | nibble(hex[i + 1])));
  }
  return out;
}

Hash32 sha3_256(BytesView data) {
  Hash32 out{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha3_256(), nullptr);
  return out;
}

static Hash32 combine(const Hash32& left, const Hash32& right) {
  Bytes buf;
  buf.reserve(64);
  buf.insert(buf.end(), left.begin(), left.end());
  buf.insert(buf.end(), right.begin(), right.end());
  return sha3_256(buf);
}

Hash32 merkle_root(const std::vector<Hash32>& leaves) {
  if (leaves.empty()) throw Error("EmptyLeafSet", "merkle_root needs at least one leaf");
  std::vector<Hash32> level = leaves;
  while (level.size() > 1) {
    std::vector<Hash32> next;
    next.reserve((level.size() + 1) / 2);
    for (size_t i = 0; i < level.size(); i += 2) {
      const Hash32& right = (i + 1 < level.size()) ? level[i + 1] : level[i];
      next.push_back(combine(level[i], right));
    }
    level = std::move(next);
  }
  return level[0];
}

MerkleProof merkle_proof(const std::vector<Hash32>& leaves, size_t index) {
  if (leaves.empty()) throw Error("EmptyLeafSet", "merkle_proof needs at least one leaf");
  if (index >= leaves.size()) throw Error("BadLeafIndex", "proof index out of range");
  MerkleProof proof;
  std::vector<Hash32> level = leaves;
  while (level.size() > 1) {
    size_t sibling = (index % 2 == 0) ? index + 1 : index - 1;
    if (sibling >= level.size()) sibling = index;  // duplicated last node
    proof.push_back({level[sibling], index % 2 == 0 ? ProofSide::Right : ProofSide::Left});
    std::vector<Hash32> next;
    next.reserve((level.size() + 1) / 2);
    for (size_t i = 0; i < level.size(); i += 2) {
      const Hash32& right = (i + 1 < level.size()) ? level[i + 1] : level[i];
      next.push_back(combine(level[i], right));
    }
    level = std::move(next);
    index /= 2;
  }
  return proof;
}

bool merkle_verify(const Hash32& leaf, const MerkleProof& proof, const Hash32& root) {
  Hash32 acc = leaf;
  for (const auto& step : proof) {
    acc = (step.side == ProofSide::Right) ? combine(acc, step.sibling)
                                          : combine(step.sibling, acc);
  }
  return acc == root;
}

Hash32 empty_body_root() {
  static const std::string tag = "quico.empty-body.v1";
  return sha3_256(BytesView{reinterpret_cast<const uint8_t*>(tag.data()), tag.size()});
}

}  // namespace quico
