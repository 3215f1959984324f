#pragma once

#include <optional>
#include <variant>

#include "quico/crypto.hpp"
#include "quico/types.hpp"
#include "quico/wsn.hpp"

namespace quico {

// QUICO wire vocabulary (plus the PBFT-style baseline phases and the small
// amount of plumbing traffic: header sync, admin loop, hop-sealed transaction
// forwarding). Canonical encodings below are the simulated wire format.

struct NewBlockMsg {
  Block block;
};

Bytes vote_preimage(uint64_t height, uint32_t seq, const Hash32& header_digest, NodeId voter,
                    bool commit_phase = false);

struct BlockAckMsg {
  uint64_t height = 0;
  uint32_t seq = 0;
  Hash32 header_digest{};
  NodeId voter;
  Signature signature;  // over vote_preimage

  bool operator==(const BlockAckMsg&) const = default;
};

struct DisputedTx {
  Hash32 id{};
  bool never_received = false;           // station never saw the transaction
  std::optional<Transaction> claimed;    // reporter's pending-list version

  bool operator==(const DisputedTx&) const = default;
};

struct BlockErrorMsg {
  uint64_t height = 0;
  uint32_t seq = 0;
  bool structural = false;  // header/merkle failure rather than a tx dispute
  std::vector<DisputedTx> disputes;
  NodeId voter;
  Signature signature;
};

struct ErrorCheckMsg {
  uint64_t height = 0;
  uint32_t seq = 0;
  Hash32 tx_id{};
  Transaction version_block;
  std::optional<Transaction> version_claimed;
  NodeId from;  // block creator
};

enum class Verdict : uint8_t {
  VersionBlock = 0,    // pending list matches the block's copy
  VersionClaimed = 1,  // pending list matches the reporter's copy
  Unknown = 2,
  Expired = 3,
};

const char* verdict_name(Verdict v);

struct ErrorResolveMsg {
  uint64_t height = 0;
  uint32_t seq = 0;
  Hash32 tx_id{};
  Verdict verdict = Verdict::Unknown;
  NodeId voter;
  Signature signature;  // over resolve_preimage
};

Bytes resolve_preimage(uint64_t height, uint32_t seq, const Hash32& tx_id, Verdict verdict,
                       NodeId voter);

/// Content signed by a gateway endorsing a transaction in transit.
Bytes endorsement_preimage(const Hash32& tx_id);

/// Creator's view of a settled dispute, forwarded to the error reporters so
/// they can bring their pending lists in line.
struct DecisionNoticeMsg {
  uint64_t height = 0;
  uint32_t seq = 0;
  Hash32 tx_id{};
  Verdict decision = Verdict::Unknown;
  std::vector<ErrorResolveMsg> replies;
  std::optional<Transaction> adopted;  // absent when the transaction was dropped
};

struct BlockConfirmMsg {
  BlockHeader header;
  std::vector<BlockAckMsg> votes;  // aggregated HACK + GACK signatures
  SimTime t_b = 0;                 // confirmation timestamp driving rotation
};

struct WarningReportMsg {
  uint64_t height = 0;
  uint32_t seq = 0;
  std::vector<NodeId> suspects;
  std::string evidence;
  NodeId reporter;
};

struct HeaderSyncRequestMsg {
  uint64_t from_height = 0;
  NodeId requester;
};

struct HeaderSyncResponseMsg {
  std::vector<BlockHeader> headers;
};

/// Baseline phase 1: the proposed block (same body rules as NewBlock).
struct PrePrepareMsg {
  Block block;
};

/// Baseline phase 2: all-to-all commit vote.
struct CommitMsg {
  uint64_t height = 0;
  uint32_t seq = 0;
  Hash32 header_digest{};
  NodeId voter;
  Signature signature;

  bool operator==(const CommitMsg&) const = default;
};

/// Baseline decision certificate from the round's primary; carries the commit
/// quorum so light nodes can check it.
struct CommitCertificateMsg {
  BlockHeader header;
  std::vector<CommitMsg> commits;
  SimTime decided_at = 0;
};

/// Admin response to a warning report: these gateways were reset to honest
/// behavior; the creator re-sends the pending block to them.
struct AdminFixMsg {
  uint64_t height = 0;
  uint32_t seq = 0;
  std::vector<NodeId> fixed;
};

/// Hop-sealed transaction in transit toward `destination` (a HAPS station).
struct TxForwardMsg {
  Ciphertext sealed;  // canonical Transaction bytes sealed for the next hop
  NodeId destination;
};

struct SensorPacketMsg {
  DataPacket packet;
};

using NetPayload =
    std::variant<SensorPacketMsg, TxForwardMsg, NewBlockMsg, BlockAckMsg, BlockErrorMsg,
                 ErrorCheckMsg, ErrorResolveMsg, DecisionNoticeMsg, BlockConfirmMsg,
                 WarningReportMsg, HeaderSyncRequestMsg, HeaderSyncResponseMsg, PrePrepareMsg,
                 CommitMsg, CommitCertificateMsg, AdminFixMsg>;

/// Data-plane or control-plane, for the traffic metric split.
bool is_control(const NetPayload& p);

const char* payload_name(const NetPayload& p);

/// Canonical encoding (golden-file pinned) and wire size of a payload.
Bytes encode_payload(const NetPayload& p);
size_t wire_size(const NetPayload& p);

void encode(Encoder& e, const BlockAckMsg& v);
void encode(Encoder& e, const BlockErrorMsg& v);
void encode(Encoder& e, const ErrorCheckMsg& v);
void encode(Encoder& e, const ErrorResolveMsg& v);
void encode(Encoder& e, const BlockConfirmMsg& v);
void encode(Encoder& e, const WarningReportMsg& v);
void encode(Encoder& e, const CommitMsg& v);

BlockAckMsg decode_block_ack(Decoder& d);
BlockConfirmMsg decode_block_confirm(Decoder& d);

}  // namespace quico
