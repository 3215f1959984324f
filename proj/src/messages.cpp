#include "quico/messages.hpp"

namespace quico {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::VersionBlock: return "version_block";
    case Verdict::VersionClaimed: return "version_claimed";
    case Verdict::Unknown: return "unknown";
    case Verdict::Expired: return "expired";
  }
  return "?";
}

Bytes vote_preimage(uint64_t height, uint32_t seq, const Hash32& header_digest, NodeId voter,
                    bool commit_phase) {
  Encoder e;
  static const std::string tag_ack = "quico.ack.v1";
  static const std::string tag_commit = "pbft.commit.v1";
  const std::string& tag = commit_phase ? tag_commit : tag_ack;
  e.raw(BytesView{reinterpret_cast<const uint8_t*>(tag.data()), tag.size()});
  e.u64(height);
  e.u32(seq);
  e.hash(header_digest);
  encode(e, voter);
  return e.take();
}

Bytes endorsement_preimage(const Hash32& tx_id) {
  Encoder e;
  static const std::string tag = "quico.endorse.v1";
  e.raw(BytesView{reinterpret_cast<const uint8_t*>(tag.data()), tag.size()});
  e.hash(tx_id);
  return e.take();
}

Bytes resolve_preimage(uint64_t height, uint32_t seq, const Hash32& tx_id, Verdict verdict,
                       NodeId voter) {
  Encoder e;
  static const std::string tag = "quico.resolve.v1";
  e.raw(BytesView{reinterpret_cast<const uint8_t*>(tag.data()), tag.size()});
  e.u64(height);
  e.u32(seq);
  e.hash(tx_id);
  e.u8(static_cast<uint8_t>(verdict));
  encode(e, voter);
  return e.take();
}

void encode(Encoder& e, const BlockAckMsg& v) {
  e.u64(v.height);
  e.u32(v.seq);
  e.hash(v.header_digest);
  encode(e, v.voter);
  encode(e, v.signature);
}

BlockAckMsg decode_block_ack(Decoder& d) {
  BlockAckMsg v;
  v.height = d.u64();
  v.seq = d.u32();
  v.header_digest = d.hash();
  v.voter = decode_node_id(d);
  v.signature = decode_signature(d);
  return v;
}

static void encode(Encoder& e, const DisputedTx& v) {
  e.hash(v.id);
  e.u8(v.never_received ? 1 : 0);
  e.u8(v.claimed.has_value() ? 1 : 0);
  if (v.claimed) encode(e, *v.claimed);
}

void encode(Encoder& e, const BlockErrorMsg& v) {
  e.u64(v.height);
  e.u32(v.seq);
  e.u8(v.structural ? 1 : 0);
  e.u32(static_cast<uint32_t>(v.disputes.size()));
  for (const auto& dt : v.disputes) encode(e, dt);
  encode(e, v.voter);
  encode(e, v.signature);
}

void encode(Encoder& e, const ErrorCheckMsg& v) {
  e.u64(v.height);
  e.u32(v.seq);
  e.hash(v.tx_id);
  encode(e, v.version_block);
  e.u8(v.version_claimed.has_value() ? 1 : 0);
  if (v.version_claimed) encode(e, *v.version_claimed);
  encode(e, v.from);
}

void encode(Encoder& e, const ErrorResolveMsg& v) {
  e.u64(v.height);
  e.u32(v.seq);
  e.hash(v.tx_id);
  e.u8(static_cast<uint8_t>(v.verdict));
  encode(e, v.voter);
  encode(e, v.signature);
}

void encode(Encoder& e, const BlockConfirmMsg& v) {
  encode(e, v.header);
  e.u32(static_cast<uint32_t>(v.votes.size()));
  for (const auto& a : v.votes) encode(e, a);
  e.i64(v.t_b);
}

BlockConfirmMsg decode_block_confirm(Decoder& d) {
  BlockConfirmMsg v;
  v.header = decode_block_header(d);
  uint32_t n = d.u32();
  v.votes.reserve(n);
  for (uint32_t i = 0; i < n; ++i) v.votes.push_back(decode_block_ack(d));
  v.t_b = d.i64();
  return v;
}

void encode(Encoder& e, const WarningReportMsg& v) {
  e.u64(v.height);
  e.u32(v.seq);
  e.u32(static_cast<uint32_t>(v.suspects.size()));
  for (const auto& n : v.suspects) encode(e, n);
  e.bytes(BytesView{reinterpret_cast<const uint8_t*>(v.evidence.data()), v.evidence.size()});
  encode(e, v.reporter);
}

void encode(Encoder& e, const CommitMsg& v) {
  e.u64(v.height);
  e.u32(v.seq);
  e.hash(v.header_digest);
  encode(e, v.voter);
  encode(e, v.signature);
}

namespace {

struct EncodeVisitor {
  Encoder& e;

  void operator()(const SensorPacketMsg& m) { encode(e, m.packet); }
  void operator()(const TxForwardMsg& m) {
    e.bytes(BytesView{m.sealed.bytes.data(), m.sealed.bytes.size()});
    encode(e, m.destination);
  }
  void operator()(const NewBlockMsg& m) { encode(e, m.block); }
  void operator()(const BlockAckMsg& m) { encode(e, m); }
  void operator()(const BlockErrorMsg& m) { encode(e, m); }
  void operator()(const ErrorCheckMsg& m) { encode(e, m); }
  void operator()(const ErrorResolveMsg& m) { encode(e, m); }
  void operator()(const DecisionNoticeMsg& m) {
    e.u64(m.height);
    e.u32(m.seq);
    e.hash(m.tx_id);
    e.u8(static_cast<uint8_t>(m.decision));
    e.u32(static_cast<uint32_t>(m.replies.size()));
    for (const auto& r : m.replies) encode(e, r);
    e.u8(m.adopted.has_value() ? 1 : 0);
    if (m.adopted) encode(e, *m.adopted);
  }
  void operator()(const BlockConfirmMsg& m) { encode(e, m); }
  void operator()(const WarningReportMsg& m) { encode(e, m); }
  void operator()(const HeaderSyncRequestMsg& m) {
    e.u64(m.from_height);
    encode(e, m.requester);
  }
  void operator()(const HeaderSyncResponseMsg& m) {
    e.u32(static_cast<uint32_t>(m.headers.size()));
    for (const auto& h : m.headers) encode(e, h);
  }
  void operator()(const PrePrepareMsg& m) { encode(e, m.block); }
  void operator()(const CommitMsg& m) { encode(e, m); }
  void operator()(const CommitCertificateMsg& m) {
    encode(e, m.header);
    e.u32(static_cast<uint32_t>(m.commits.size()));
    for (const auto& c : m.commits) encode(e, c);
    e.i64(m.decided_at);
  }
  void operator()(const AdminFixMsg& m) {
    e.u64(m.height);
    e.u32(m.seq);
    e.u32(static_cast<uint32_t>(m.fixed.size()));
    for (const auto& n : m.fixed) encode(e, n);
  }
};

}  // namespace

Bytes encode_payload(const NetPayload& p) {
  Encoder e;
  e.u8(static_cast<uint8_t>(p.index()));
  std::visit(EncodeVisitor{e}, p);
  return e.take();
}

// Fixed per-message envelope: addressing, type tag, checksum.
constexpr size_t kEnvelopeBytes = 28;

size_t wire_size(const NetPayload& p) { return encode_payload(p).size() + kEnvelopeBytes; }

bool is_control(const NetPayload& p) {
  return !(std::holds_alternative<SensorPacketMsg>(p) || std::holds_alternative<TxForwardMsg>(p));
}

const char* payload_name(const NetPayload& p) {
  static const char* names[] = {
      "sensor_packet",  "tx_forward",     "new_block",      "block_ack",
      "block_error",    "error_check",    "error_resolve",  "decision_notice",
      "block_confirm",  "warning_report", "header_sync_req", "header_sync_resp",
      "pre_prepare",    "commit",         "commit_certificate", "admin_fix"};
  return names[p.index()];
}

}  // namespace quico
