#include "quico/types.hpp"

#include <algorithm>

namespace quico {

const char* role_name(Role r) {
  switch (r) {
    case Role::Sensor: return "sensor";
    case Role::ClusterHead: return "cluster_head";
    case Role::Gateway: return "gateway";
    case Role::HapsStation: return "haps_station";
    case Role::CloudUser: return "cloud_user";
    case Role::Admin: return "admin";
  }
  return "?";
}

std::string to_string(const NodeId& id) {
  return std::string(role_name(id.role)) + "/" + std::to_string(id.index);
}

void encode(Encoder& e, const NodeId& v) {
  e.u8(static_cast<uint8_t>(v.role));
  e.u32(v.index);
}

void encode(Encoder& e, const Reading& v) {
  encode(e, v.sensor);
  e.i64(v.timestamp);
  e.bytes(BytesView{v.payload.data(), v.payload.size()});
  e.f64(v.ground_truth_value);
  e.u8(v.secret_malicious_flag ? 1 : 0);
}

void encode(Encoder& e, const Signature& v) {
  e.bytes(BytesView{v.bytes.data(), v.bytes.size()});
  encode(e, v.signer);
}

void encode(Encoder& e, const Endorsement& v) {
  encode(e, v.endorser);
  encode(e, v.signature);
}

void encode(Encoder& e, const Transaction& v) {
  e.hash(v.id);
  encode(e, v.origin_gateway);
  e.u32(static_cast<uint32_t>(v.readings.size()));
  for (const auto& r : v.readings) encode(e, r);
  e.i64(v.creation_timestamp);
  e.i64(v.expiry_deadline);
  e.u32(v.service_id);
  encode(e, v.creator_signature);
  e.u32(static_cast<uint32_t>(v.endorsements.size()));
  for (const auto& en : v.endorsements) encode(e, en);
}

void encode(Encoder& e, const BlockHeader& v) {
  e.u64(v.height);
  e.u32(v.sequence_number);
  e.hash(v.previous_hash);
  e.hash(v.merkle_root);
  e.i64(v.timestamp);
  encode(e, v.creator);
}

void encode(Encoder& e, const Block& v) {
  encode(e, v.header);
  e.u32(static_cast<uint32_t>(v.body.size()));
  for (const auto& tx : v.body) encode(e, tx);
}

NodeId decode_node_id(Decoder& d) {
  NodeId v;
  uint8_t role = d.u8();
  if (role > static_cast<uint8_t>(Role::Admin)) throw Error("CodecError", "bad role tag");
  v.role = static_cast<Role>(role);
  v.index = d.u32();
  return v;
}

Reading decode_reading(Decoder& d) {
  Reading v;
  v.sensor = decode_node_id(d);
  v.timestamp = d.i64();
  v.payload = d.bytes();
  v.ground_truth_value = d.f64();
  v.secret_malicious_flag = d.u8() != 0;
  return v;
}

Signature decode_signature(Decoder& d) {
  Signature v;
  v.bytes = d.bytes();
  v.signer = decode_node_id(d);
  return v;
}

Endorsement decode_endorsement(Decoder& d) {
  Endorsement v;
  v.endorser = decode_node_id(d);
  v.signature = decode_signature(d);
  return v;
}

Transaction decode_transaction(Decoder& d) {
  Transaction v;
  v.id = d.hash();
  v.origin_gateway = decode_node_id(d);
  uint32_t n = d.u32();
  v.readings.reserve(n);
  for (uint32_t i = 0; i < n; ++i) v.readings.push_back(decode_reading(d));
  v.creation_timestamp = d.i64();
  v.expiry_deadline = d.i64();
  v.service_id = d.u32();
  v.creator_signature = decode_signature(d);
  uint32_t m = d.u32();
  v.endorsements.reserve(m);
  for (uint32_t i = 0; i < m; ++i) v.endorsements.push_back(decode_endorsement(d));
  return v;
}

BlockHeader decode_block_header(Decoder& d) {
  BlockHeader v;
  v.height = d.u64();
  v.sequence_number = d.u32();
  v.previous_hash = d.hash();
  v.merkle_root = d.hash();
  v.timestamp = d.i64();
  v.creator = decode_node_id(d);
  return v;
}

Block decode_block(Decoder& d) {
  Block v;
  v.header = decode_block_header(d);
  uint32_t n = d.u32();
  v.body.reserve(n);
  for (uint32_t i = 0; i < n; ++i) v.body.push_back(decode_transaction(d));
  return v;
}

Bytes transaction_preimage(const Transaction& tx) {
  Encoder e;
  encode(e, tx.origin_gateway);
  e.u32(static_cast<uint32_t>(tx.readings.size()));
  for (const auto& r : tx.readings) encode(e, r);
  e.i64(tx.creation_timestamp);
  e.i64(tx.expiry_deadline);
  e.u32(tx.service_id);
  return e.take();
}

Hash32 transaction_id(const Transaction& tx) {
  return sha3_256(transaction_preimage(tx));
}

Hash32 header_hash(const BlockHeader& h) {
  return sha3_256(canonical_encode(h));
}

Hash32 body_merkle_root(const std::vector<Transaction>& body) {
  if (body.empty()) return empty_body_root();
  std::vector<Hash32> leaves;
  leaves.reserve(body.size());
  for (const auto& tx : body) leaves.push_back(tx.id);
  return merkle_root(leaves);
}

bool body_order_less(const Transaction& a, const Transaction& b) {
  if (a.creation_timestamp != b.creation_timestamp) {
    return a.creation_timestamp < b.creation_timestamp;
  }
  return a.id < b.id;
}

}  // namespace quico
