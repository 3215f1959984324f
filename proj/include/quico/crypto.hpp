#pragma once

#include <unordered_map>

#include "quico/types.hpp"

namespace quico {

inline constexpr size_t kPublicKeyBytes = 32;
inline constexpr size_t kSignatureBytes = 64;
/// Sealed-box overhead: ephemeral public key + MAC.
inline constexpr size_t kSealOverhead = 48;

using Seed = Seed32;

struct KeyPair {
  Bytes public_key;  // Ed25519, 32 bytes
  Bytes secret_key;  // Ed25519, 64 bytes
  NodeId owner;
};

struct Ciphertext {
  Bytes bytes;
};

/// Deterministic keypair: the owner id is mixed into the seed so one scenario
/// seed yields every node's keys.
KeyPair keygen(const Seed& seed, NodeId owner);

Signature sign(BytesView message, const KeyPair& key);

/// True iff `sig` was produced over `message` by the key matching
/// `public_key`. Malformed input returns false, never throws.
bool verify(BytesView message, const Signature& sig, const Bytes& public_key);

/// Public-key sealing (ephemeral X25519 + XSalsa20-Poly1305). The ephemeral
/// key is derived from `entropy`, keeping simulation runs reproducible;
/// distinct entropy yields distinct ciphertexts for the same message.
Ciphertext seal(BytesView message, const Bytes& recipient_public_key, const Seed& entropy);

/// Throws Error("DecryptionFailure") when `recipient` cannot open `ct`.
Bytes open(const Ciphertext& ct, const KeyPair& recipient);

/// Static in-scenario registry of every node's keys, known to all nodes.
/// Stands in for certificate provisioning.
class KeyRegistry {
 public:
  explicit KeyRegistry(const Seed& scenario_seed) : scenario_seed_(scenario_seed) {}

  /// Creates (or returns) the deterministic keypair for `node`.
  const KeyPair& register_node(NodeId node);

  const KeyPair& pair_of(NodeId node) const;
  const Bytes& public_key_of(NodeId node) const;
  bool has(NodeId node) const { return pairs_.contains(node); }

  /// Convenience: verify a signature against the signer's registered key.
  bool verify_signed(BytesView message, const Signature& sig) const;

 private:
  Seed scenario_seed_;
  std::unordered_map<NodeId, KeyPair> pairs_;
};

}  // namespace quico
