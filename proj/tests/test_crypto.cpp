#include <doctest.h>

#include "quico/crypto.hpp"
#include "quico/rng.hpp"

using namespace quico;

namespace {

Seed seed_of(uint8_t b) {
  Seed s;
  s.fill(b);
  return s;
}

Bytes msg(const char* text) {
  return Bytes(text, text + std::strlen(text));
}

}  // namespace

TEST_CASE("keygen is deterministic and owner-separated") {
  NodeId n1{Role::Gateway, 1}, n2{Role::Gateway, 2};
  KeyPair a = keygen(seed_of(5), n1);
  KeyPair b = keygen(seed_of(5), n1);
  CHECK(a.public_key == b.public_key);
  CHECK(a.secret_key == b.secret_key);
  KeyPair c = keygen(seed_of(5), n2);
  CHECK(a.public_key != c.public_key);
  KeyPair d = keygen(seed_of(6), n1);
  CHECK(a.public_key != d.public_key);
}

TEST_CASE("sign/verify round trip and negative cases") {
  KeyPair k = keygen(seed_of(1), {Role::Gateway, 0});
  KeyPair k2 = keygen(seed_of(1), {Role::Gateway, 1});
  Bytes m = msg("block ack height 4");
  Signature sig = sign(BytesView{m.data(), m.size()}, k);
  CHECK(verify(BytesView{m.data(), m.size()}, sig, k.public_key));

  Bytes other = msg("block ack height 5");
  CHECK_FALSE(verify(BytesView{other.data(), other.size()}, sig, k.public_key));
  CHECK_FALSE(verify(BytesView{m.data(), m.size()}, sig, k2.public_key));

  Signature truncated = sig;
  truncated.bytes.resize(10);
  CHECK_FALSE(verify(BytesView{m.data(), m.size()}, truncated, k.public_key));
}

TEST_CASE("random signature bytes never verify") {
  KeyPair k = keygen(seed_of(2), {Role::HapsStation, 0});
  Bytes m = msg("forgery target");
  Rng rng(777);
  int successes = 0;
  for (int i = 0; i < 10000; ++i) {
    Signature forged;
    forged.signer = k.owner;
    forged.bytes.resize(kSignatureBytes);
    for (auto& b : forged.bytes) b = static_cast<uint8_t>(rng.next());
    if (verify(BytesView{m.data(), m.size()}, forged, k.public_key)) ++successes;
  }
  CHECK(successes == 0);
}

TEST_CASE("seal/open round trip; wrong key fails; fresh entropy varies bytes") {
  KeyPair alice = keygen(seed_of(3), {Role::Gateway, 1});
  KeyPair bob = keygen(seed_of(3), {Role::Gateway, 2});
  Bytes m = msg("pending transaction bundle");

  Rng rng(11);
  Ciphertext c1 = seal(BytesView{m.data(), m.size()}, alice.public_key, rng.seed_bytes());
  Ciphertext c2 = seal(BytesView{m.data(), m.size()}, alice.public_key, rng.seed_bytes());
  CHECK(c1.bytes.size() == m.size() + kSealOverhead);
  CHECK(c1.bytes != c2.bytes);
  CHECK(open(c1, alice) == m);
  CHECK(open(c2, alice) == m);
  CHECK_THROWS_WITH_AS(open(c1, bob), doctest::Contains("DecryptionFailure"), Error);

  // same entropy -> bit-identical ciphertext (simulation reproducibility)
  Ciphertext c3 = seal(BytesView{m.data(), m.size()}, alice.public_key, seed_of(9));
  Ciphertext c4 = seal(BytesView{m.data(), m.size()}, alice.public_key, seed_of(9));
  CHECK(c3.bytes == c4.bytes);
}

TEST_CASE("hop-by-hop confidentiality: only the addressed hop can open") {
  // G1 -> G2 -> A1 -> H1 relay chain; each leg sealed to the next hop only.
  Seed scenario = seed_of(7);
  KeyRegistry reg(scenario);
  std::vector<NodeId> chain{{Role::Gateway, 1}, {Role::Gateway, 2}, {Role::Gateway, 3},
                            {Role::HapsStation, 1}};
  for (auto n : chain) reg.register_node(n);
  NodeId outsider{Role::Gateway, 9};
  reg.register_node(outsider);

  Bytes payload = msg("sensor aggregate");
  Rng rng(20);
  for (size_t hop = 0; hop + 1 < chain.size(); ++hop) {
    NodeId next = chain[hop + 1];
    Ciphertext ct = seal(BytesView{payload.data(), payload.size()}, reg.public_key_of(next),
                         rng.seed_bytes());
    CHECK(open(ct, reg.pair_of(next)) == payload);
    for (auto n : chain) {
      if (n == next) continue;
      CHECK_THROWS_AS(open(ct, reg.pair_of(n)), Error);
    }
    CHECK_THROWS_AS(open(ct, reg.pair_of(outsider)), Error);
  }
}

TEST_CASE("registry verifies signatures by signer identity") {
  KeyRegistry reg(seed_of(8));
  NodeId gw{Role::Gateway, 4};
  reg.register_node(gw);
  Bytes m = msg("endorsement");
  Signature sig = sign(BytesView{m.data(), m.size()}, reg.pair_of(gw));
  CHECK(reg.verify_signed(BytesView{m.data(), m.size()}, sig));

  Signature wrong_signer = sig;
  wrong_signer.signer = {Role::Gateway, 5};
  reg.register_node(wrong_signer.signer);
  CHECK_FALSE(reg.verify_signed(BytesView{m.data(), m.size()}, wrong_signer));
}
