#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "quico/bytes.hpp"
#include "quico/codec.hpp"
#include "quico/hash.hpp"

namespace quico {

/// Simulated time in integer milliseconds.
using SimTime = int64_t;

enum class Role : uint8_t {
  Sensor = 0,
  ClusterHead = 1,
  Gateway = 2,
  HapsStation = 3,
  CloudUser = 4,
  Admin = 5,
};

const char* role_name(Role r);

/// (role, index) pair, globally unique within a scenario. The role is fixed
/// for a node's lifetime; cluster heads keep their Sensor identity.
struct NodeId {
  Role role = Role::Sensor;
  uint32_t index = 0;

  auto operator<=>(const NodeId&) const = default;
};

std::string to_string(const NodeId& id);

struct Reading {
  NodeId sensor;
  SimTime timestamp = 0;
  Bytes payload;               // opaque application bytes, size > 0
  double ground_truth_value = 0.0;
  // Never consulted by node logic; only the metrics pipeline reads it.
  bool secret_malicious_flag = false;

  bool operator==(const Reading&) const = default;
};

struct Signature {
  Bytes bytes;   // scheme-defined length (64 for Ed25519)
  NodeId signer;

  bool operator==(const Signature&) const = default;
};

struct Endorsement {
  NodeId endorser;
  Signature signature;

  bool operator==(const Endorsement&) const = default;
};

struct Transaction {
  Hash32 id{};                 // sha3 of the preimage (all fields below except endorsements)
  NodeId origin_gateway;
  std::vector<Reading> readings;
  SimTime creation_timestamp = 0;
  SimTime expiry_deadline = 0;
  uint32_t service_id = 0;
  Signature creator_signature;
  // Accumulates in transit (forwarding gateways); excluded from the id.
  std::vector<Endorsement> endorsements;

  bool operator==(const Transaction&) const = default;
};

struct BlockHeader {
  uint64_t height = 0;
  uint32_t sequence_number = 0;  // bumped each time the block is regenerated
  Hash32 previous_hash{};
  Hash32 merkle_root{};
  SimTime timestamp = 0;
  NodeId creator;                // always a HapsStation

  bool operator==(const BlockHeader&) const = default;
};

struct Block {
  BlockHeader header;
  std::vector<Transaction> body;  // sorted by (creation_timestamp, id)

  bool operator==(const Block&) const = default;
};

// -- canonical encoding -----------------------------------------------------

void encode(Encoder& e, const NodeId& v);
void encode(Encoder& e, const Reading& v);
void encode(Encoder& e, const Signature& v);
void encode(Encoder& e, const Endorsement& v);
void encode(Encoder& e, const Transaction& v);
void encode(Encoder& e, const BlockHeader& v);
void encode(Encoder& e, const Block& v);

NodeId decode_node_id(Decoder& d);
Reading decode_reading(Decoder& d);
Signature decode_signature(Decoder& d);
Endorsement decode_endorsement(Decoder& d);
Transaction decode_transaction(Decoder& d);
BlockHeader decode_block_header(Decoder& d);
Block decode_block(Decoder& d);

template <typename T>
Bytes canonical_encode(const T& v) {
  Encoder e;
  encode(e, v);
  return e.take();
}

/// Preimage of the transaction id: every field except id and endorsements.
Bytes transaction_preimage(const Transaction& tx);
Hash32 transaction_id(const Transaction& tx);

Hash32 header_hash(const BlockHeader& h);

/// Merkle root over the body's transaction ids (empty body handled by the
/// domain-separated empty root).
Hash32 body_merkle_root(const std::vector<Transaction>& body);

/// Body order contract: (creation_timestamp, id) ascending.
bool body_order_less(const Transaction& a, const Transaction& b);

}  // namespace quico

template <>
struct std::hash<quico::NodeId> {
  size_t operator()(const quico::NodeId& id) const noexcept {
    return (static_cast<size_t>(id.role) << 32) ^ id.index;
  }
};

template <>
struct std::hash<quico::Hash32> {
  size_t operator()(const quico::Hash32& h) const noexcept {
    size_t v;
    std::memcpy(&v, h.data(), sizeof(v));
    return v;
  }
};
