#include <doctest.h>

#include <algorithm>

#include "quico/hash.hpp"
#include "quico/rng.hpp"
#include "quico/types.hpp"

using namespace quico;

namespace {

Hash32 filled(uint8_t b) {
  Hash32 h;
  h.fill(b);
  return h;
}

Transaction sample_tx(uint32_t salt) {
  Transaction tx;
  tx.origin_gateway = {Role::Gateway, salt};
  Reading r;
  r.sensor = {Role::Sensor, 7 + salt};
  r.timestamp = 1200 + salt;
  r.payload = {1, 2, 3, static_cast<uint8_t>(salt)};
  r.ground_truth_value = 20.25;
  tx.readings.push_back(r);
  tx.creation_timestamp = 1250;
  tx.expiry_deadline = 2250;
  tx.service_id = 1;
  tx.id = transaction_id(tx);
  tx.creator_signature.bytes.assign(64, static_cast<uint8_t>(salt));
  tx.creator_signature.signer = tx.origin_gateway;
  return tx;
}

}  // namespace

TEST_CASE("sha3-256 matches the published empty-string and abc vectors") {
  CHECK(to_hex(sha3_256(Bytes{})) ==
        "a7ffc6f8bf1ed76651c14756a061d662f580ff4de43b49fa82d80a4b80f8434a");
  Bytes abc{'a', 'b', 'c'};
  CHECK(to_hex(sha3_256(abc)) ==
        "3a985da74fe225b2045c172d6bd390bd855f086e3e9d525b46bfe24511431532");
}

TEST_CASE("sha3-256 is deterministic and bit-flip sensitive") {
  Bytes msg{0x10, 0x20, 0x30, 0x40};
  CHECK(sha3_256(msg) == sha3_256(msg));
  for (size_t bit = 0; bit < msg.size() * 8; bit += 7) {
    Bytes flipped = msg;
    flipped[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
    CHECK(sha3_256(flipped) != sha3_256(msg));
  }
}

TEST_CASE("merkle root base cases") {
  Hash32 h1 = filled(1), h2 = filled(2), h3 = filled(3);
  // single leaf is its own root
  CHECK(merkle_root({h1}) == h1);
  // one combine step; value frozen from an independent sha3 script
  CHECK(to_hex(merkle_root({h1, h2})) ==
        "adcb9583b7caa53aff2b8f4ed8aaf407399051b1b4f5a39aa2c97d5069b50657");
  // odd level duplicates the last node
  CHECK(to_hex(merkle_root({h1, h2, h3})) ==
        "6ff4b1cac035d8c9f637e2513488ce64c6114d5de8e5753e5d92719f9a8d893e");
  CHECK(to_hex(merkle_root({h1, h2, h3, filled(4), filled(5)})) ==
        "1dafbaf0c440eff0f10f6c61121e2f1c4d1bfe771a2ee665cd9b5c51542d179f");
  CHECK_THROWS_WITH_AS(merkle_root({}), doctest::Contains("EmptyLeafSet"), Error);
}

TEST_CASE("merkle root is order sensitive") {
  Rng rng(42);
  std::vector<Hash32> leaves;
  for (int i = 0; i < 6; ++i) {
    Hash32 h;
    auto s = rng.seed_bytes();
    std::copy(s.begin(), s.end(), h.begin());
    leaves.push_back(h);
  }
  Hash32 root = merkle_root(leaves);
  for (int trial = 0; trial < 50; ++trial) {
    auto shuffled = leaves;
    for (size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.uniform_int(0, static_cast<int64_t>(i) - 1)]);
    }
    if (shuffled == leaves) continue;
    CHECK(merkle_root(shuffled) != root);
  }
}

TEST_CASE("merkle proofs verify and reject tampering") {
  Rng rng(7);
  for (size_t n : {1u, 2u, 3u, 5u, 8u, 13u}) {
    std::vector<Hash32> leaves;
    for (size_t i = 0; i < n; ++i) {
      Hash32 h;
      auto s = rng.seed_bytes();
      std::copy(s.begin(), s.end(), h.begin());
      leaves.push_back(h);
    }
    Hash32 root = merkle_root(leaves);
    for (size_t i = 0; i < n; ++i) {
      auto proof = merkle_proof(leaves, i);
      CHECK(merkle_verify(leaves[i], proof, root));
      if (!proof.empty()) {
        auto bad = proof;
        bad[0].sibling[0] ^= 0x01;
        CHECK_FALSE(merkle_verify(leaves[i], bad, root));
      }
      Hash32 other = leaves[i];
      other[31] ^= 0x80;
      CHECK_FALSE(merkle_verify(other, proof, root));
    }
  }
}

TEST_CASE("canonical encoding round-trips domain types") {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    Transaction tx = sample_tx(static_cast<uint32_t>(rng.uniform_int(0, 1000)));
    // vary optional parts
    if (i % 3 == 0) {
      Endorsement en;
      en.endorser = {Role::Gateway, 3};
      en.signature.bytes.assign(64, 0xab);
      en.signature.signer = en.endorser;
      tx.endorsements.push_back(en);
    }
    Bytes enc = canonical_encode(tx);
    Decoder d(BytesView{enc.data(), enc.size()});
    Transaction back = decode_transaction(d);
    d.expect_end();
    CHECK(back == tx);
    CHECK(canonical_encode(back) == enc);
  }

  NodeId n{Role::Sensor, 7};
  Bytes enc = canonical_encode(n);
  Decoder d(BytesView{enc.data(), enc.size()});
  CHECK(decode_node_id(d) == n);
}

TEST_CASE("encoding is deterministic and distinguishes values") {
  Transaction a = sample_tx(1);
  Transaction b = sample_tx(1);
  CHECK(canonical_encode(a) == canonical_encode(b));
  b.readings[0].payload[0] ^= 0x01;
  b.id = transaction_id(b);
  CHECK(canonical_encode(a) != canonical_encode(b));
}

TEST_CASE("block headers hash-link and bodies are tamper evident") {
  Block blk;
  blk.header.height = 3;
  blk.header.previous_hash = filled(9);
  blk.header.timestamp = 500;
  blk.header.creator = {Role::HapsStation, 0};
  for (uint32_t i = 0; i < 4; ++i) blk.body.push_back(sample_tx(i));
  std::sort(blk.body.begin(), blk.body.end(), body_order_less);
  blk.header.merkle_root = body_merkle_root(blk.body);
  Hash32 h = header_hash(blk.header);

  Rng rng(4242);
  for (int trial = 0; trial < 64; ++trial) {
    Block mutated = blk;
    auto& tx = mutated.body[rng.uniform_int(0, static_cast<int64_t>(mutated.body.size()) - 1)];
    Bytes enc = transaction_preimage(tx);
    size_t bit = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(enc.size()) * 8 - 1));
    enc[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
    tx.id = sha3_256(enc);  // id of the tampered content
    CHECK(body_merkle_root(mutated.body) != blk.header.merkle_root);
    mutated.header.merkle_root = body_merkle_root(mutated.body);
    CHECK(header_hash(mutated.header) != h);
  }
}

TEST_CASE("empty body root is a fixed constant distinct from any leaf tree") {
  CHECK(empty_body_root() == empty_body_root());
  CHECK(empty_body_root() != merkle_root({filled(0)}));
  CHECK(body_merkle_root({}) == empty_body_root());
}

TEST_CASE("body order sorts by timestamp then id") {
  Transaction t1 = sample_tx(1), t2 = sample_tx(2);
  t1.creation_timestamp = 100;
  t2.creation_timestamp = 90;
  CHECK(body_order_less(t2, t1));
  t2.creation_timestamp = 100;
  t1.id = filled(1);
  t2.id = filled(2);
  CHECK(body_order_less(t1, t2));
  CHECK_FALSE(body_order_less(t2, t1));
}

TEST_CASE("rng streams are deterministic and label-isolated") {
  Rng a(123), b(123);
  CHECK(a.stream("x").next() == b.stream("x").next());
  CHECK(a.stream("x").next() != a.stream("y").next());
  CHECK(a.stream("x", 1).next() != a.stream("x", 2).next());
  Rng c(123);
  auto s = c.stream("noise");
  double u = s.uniform01();
  CHECK(u >= 0.0);
  CHECK(u < 1.0);
  for (int i = 0; i < 1000; ++i) {
    double v = s.truncated_normal(0.0, 0.25, -0.5, 0.5);
    CHECK(v >= -0.5);
    CHECK(v <= 0.5);
  }
}
