#include "quico/crypto.hpp"

#include <sodium.h>

#include <mutex>

namespace quico {

static void ensure_sodium() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    if (sodium_init() < 0) throw Error("CryptoInit", "sodium_init failed");
  });
}

KeyPair keygen(const Seed& seed, NodeId owner) {
  ensure_sodium();
  Encoder e;
  e.raw(BytesView{seed.data(), seed.size()});
  encode(e, owner);
  static const std::string tag = "quico.keygen.v1";
  e.raw(BytesView{reinterpret_cast<const uint8_t*>(tag.data()), tag.size()});
  Hash32 derived = sha3_256(e.buffer());

  KeyPair kp;
  kp.owner = owner;
  kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
  kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
  crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), derived.data());
  return kp;
}

Signature sign(BytesView message, const KeyPair& key) {
  ensure_sodium();
  Signature sig;
  sig.signer = key.owner;
  sig.bytes.resize(crypto_sign_BYTES);
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                       key.secret_key.data());
  return sig;
}

bool verify(BytesView message, const Signature& sig, const Bytes& public_key) {
  ensure_sodium();
  if (sig.bytes.size() != crypto_sign_BYTES) return false;
  if (public_key.size() != crypto_sign_PUBLICKEYBYTES) return false;
  return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(),
                                     public_key.data()) == 0;
}

Ciphertext seal(BytesView message, const Bytes& recipient_public_key, const Seed& entropy) {
  ensure_sodium();
  if (recipient_public_key.size() != crypto_sign_PUBLICKEYBYTES) {
    throw Error("BadKey", "recipient public key must be 32 bytes");
  }
  uint8_t recipient_curve[crypto_scalarmult_curve25519_BYTES];
  if (crypto_sign_ed25519_pk_to_curve25519(recipient_curve, recipient_public_key.data()) != 0) {
    throw Error("BadKey", "public key not convertible to curve25519");
  }

  // Sealed box with a caller-supplied ephemeral secret, wire-compatible with
  // crypto_box_seal_open: epk || box(m, nonce=blake2b24(epk||rpk)).
  uint8_t esk[crypto_box_SECRETKEYBYTES];
  std::memcpy(esk, entropy.data(), sizeof(esk));
  uint8_t epk[crypto_box_PUBLICKEYBYTES];
  crypto_scalarmult_base(epk, esk);

  uint8_t nonce[crypto_box_NONCEBYTES];
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, sizeof(nonce));
  crypto_generichash_update(&st, epk, sizeof(epk));
  crypto_generichash_update(&st, recipient_curve, sizeof(recipient_curve));
  crypto_generichash_final(&st, nonce, sizeof(nonce));

  Ciphertext ct;
  ct.bytes.resize(crypto_box_PUBLICKEYBYTES + message.size() + crypto_box_MACBYTES);
  std::memcpy(ct.bytes.data(), epk, sizeof(epk));
  if (crypto_box_easy(ct.bytes.data() + sizeof(epk), message.data(), message.size(), nonce,
                      recipient_curve, esk) != 0) {
    throw Error("SealFailure", "crypto_box_easy failed");
  }
  return ct;
}

Bytes open(const Ciphertext& ct, const KeyPair& recipient) {
  ensure_sodium();
  if (ct.bytes.size() < kSealOverhead) throw Error("DecryptionFailure", "ciphertext too short");
  uint8_t pk_curve[crypto_scalarmult_curve25519_BYTES];
  uint8_t sk_curve[crypto_scalarmult_curve25519_SCALARBYTES];
  if (crypto_sign_ed25519_pk_to_curve25519(pk_curve, recipient.public_key.data()) != 0 ||
      crypto_sign_ed25519_sk_to_curve25519(sk_curve, recipient.secret_key.data()) != 0) {
    throw Error("DecryptionFailure", "recipient key not convertible");
  }
  Bytes out(ct.bytes.size() - kSealOverhead);
  if (crypto_box_seal_open(out.data(), ct.bytes.data(), ct.bytes.size(), pk_curve, sk_curve) !=
      0) {
    throw Error("DecryptionFailure", "sealed box does not open under this key");
  }
  return out;
}

const KeyPair& KeyRegistry::register_node(NodeId node) {
  auto it = pairs_.find(node);
  if (it != pairs_.end()) return it->second;
  return pairs_.emplace(node, keygen(scenario_seed_, node)).first->second;
}

const KeyPair& KeyRegistry::pair_of(NodeId node) const {
  auto it = pairs_.find(node);
  if (it == pairs_.end()) throw Error("UnknownNode", "no key registered for " + to_string(node));
  return it->second;
}

const Bytes& KeyRegistry::public_key_of(NodeId node) const { return pair_of(node).public_key; }

bool KeyRegistry::verify_signed(BytesView message, const Signature& sig) const {
  auto it = pairs_.find(sig.signer);
  if (it == pairs_.end()) return false;
  return verify(message, sig, it->second.public_key);
}

}  // namespace quico
