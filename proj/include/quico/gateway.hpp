#pragma once

#include <deque>
#include <map>
#include <set>

#include "quico/messages.hpp"

namespace quico {

struct ConsensusParams {
  uint32_t X = 3;              // HAPS stations hosting the service
  uint32_t Y = 9;              // participating gateways
  SimTime t_th = 100;          // block generation interval
  SimTime t_w = 100;           // creator waiting period
  uint32_t max_retry_rounds = 3;

  uint32_t hack_quorum() const { return X - 1; }
  uint32_t gack_quorum() const { return Y / 2 + 1; }  // floor(Y/2 + 1)

  void validate() const;
};

enum class IngestOutcome : uint8_t { Accepted, Discarded, Deferred };

enum class DiscardReason : uint8_t {
  None = 0,
  BadSignature,
  Stale,          // readings older than the freshness horizon
  Anomalous,      // deviates from the near-sensor median
  NoComparables,  // deferred and never saw comparable neighbor readings
};

const char* discard_reason_name(DiscardReason r);

struct IngestResult {
  IngestOutcome outcome = IngestOutcome::Accepted;
  DiscardReason reason = DiscardReason::None;
};

struct PendingEntry {
  Transaction tx;
  SimTime inserted_at = 0;
};

/// Hash-linked list of block headers, genesis first.
class HeaderChain {
 public:
  explicit HeaderChain(BlockHeader genesis) { headers_.push_back(std::move(genesis)); }

  const BlockHeader& tip() const { return headers_.back(); }
  Hash32 tip_hash() const { return header_hash(headers_.back()); }
  uint64_t tip_height() const { return headers_.back().height; }
  const std::vector<BlockHeader>& headers() const { return headers_; }

  /// Appends iff height and previous_hash extend the tip.
  bool try_append(const BlockHeader& h);

 private:
  std::vector<BlockHeader> headers_;
};

struct GatewayOptions {
  uint32_t service_id = 1;
  SimTime aggregation_period = 50;
  SimTime expiry_horizon = 1000;
  SimTime reading_freshness = 1000;  // readings older than this are obsolete on arrival
  SimTime neighbor_window = 500;     // +- window for the near-sensor median
  double tolerance = 0.5;            // anomaly threshold (relative deviation)
  double endorsed_tolerance_factor = 2.0;  // slack for fully endorsed packets
  int max_deferral_ticks = 3;
  bool endorsement_trust = true;     // QUICO mode; the baseline checks every packet
};

/// Result of an aggregation tick: at most one fresh transaction plus the
/// fates of deferred packets that were decided this tick.
struct AggregateResult {
  std::vector<Transaction> txs;
  std::vector<std::pair<DataPacket, IngestResult>> deferred_decisions;
  std::vector<Transaction> expired;  // swept from the pending list this tick
};

enum class OnBlockKind : uint8_t { Ack, Error, HeightMismatch };

struct OnBlockResult {
  OnBlockKind kind = OnBlockKind::Ack;
  BlockAckMsg ack;
  BlockErrorMsg error;
};

enum class ConfirmApply : uint8_t { Applied, InvalidConfirm, HeightMismatch };

struct UserReply {
  bool endorsed = false;
  Signature signature;  // appended when endorsed
};

/// GHG/AHG behavior: ingestion and anomaly filtering, periodic aggregation,
/// pending-list upkeep, light-node header chain, and consensus voting.
class GatewayState {
 public:
  GatewayState(NodeId id, KeyPair key, const KeyRegistry* registry, ConsensusParams params,
               GatewayOptions opts, BlockHeader genesis);

  NodeId id() const { return id_; }
  const GatewayOptions& options() const { return opts_; }
  const HeaderChain& header_chain() const { return chain_; }
  const std::map<Hash32, PendingEntry>& pending() const { return pending_; }
  size_t buffered_readings() const { return buffer_.size(); }
  size_t deferred_count() const { return deferred_.size(); }

  void set_sensor_cluster(NodeId sensor, uint32_t cluster);

  IngestResult ingest_packet(const DataPacket& packet, SimTime now);

  /// Periodic tick (now is a multiple of the aggregation period). Sweeps
  /// expiry, re-evaluates deferred packets, then groups the buffer into one
  /// signed transaction inserted into the pending list.
  AggregateResult aggregate(SimTime now);

  /// Pending-list insertion for transactions this gateway relays onward.
  /// Appends this gateway's endorsement. Returns false for invalid ones.
  bool adopt_forwarded(Transaction& tx, SimTime now);

  OnBlockResult on_new_block(const Block& block, SimTime now);

  ErrorResolveMsg on_error_check(const ErrorCheckMsg& check);

  /// Creator's settled dispute: bring the pending copy in line. Returns a
  /// fresh ack when our earlier dispute was overruled and the block's copy
  /// now matches.
  std::optional<BlockAckMsg> on_decision_notice(const DecisionNoticeMsg& notice);

  ConfirmApply on_block_confirm(const BlockConfirmMsg& confirm);

  /// Baseline phase-2 certificate: same append path with commit votes.
  ConfirmApply on_commit_certificate(const CommitCertificateMsg& cert);

  UserReply endorse_user_reply(const Transaction& tx, const MerkleProof& proof,
                               uint64_t header_height) const;

  /// Headers the requester is missing, for light-chain sync.
  HeaderSyncResponseMsg on_header_sync_request(const HeaderSyncRequestMsg& req) const;
  void on_header_sync_response(const HeaderSyncResponseMsg& resp);

  /// Does the block's copy byte-match ours (id preimage + creator signature;
  /// endorsements legitimately accumulate in transit and are excluded)?
  static bool same_transaction(const Transaction& a, const Transaction& b);

 private:
  IngestResult evaluate_packet(const DataPacket& packet, SimTime now, bool defer_allowed);
  void accept_packet(const DataPacket& packet, SimTime now);
  void remember_reading(const Reading& r);
  std::optional<double> neighbor_median(const Reading& r, SimTime now) const;
  bool validate_transaction_sigs(const Transaction& tx) const;
  void sweep_history(SimTime now);
  void apply_confirmed_ids(const std::vector<Hash32>& ids);
  void prune_round_state(uint64_t below_height);

  NodeId id_;
  KeyPair key_;
  const KeyRegistry* registry_;
  ConsensusParams params_;
  GatewayOptions opts_;
  HeaderChain chain_;

  std::map<Hash32, PendingEntry> pending_;
  std::vector<Reading> buffer_;
  std::set<std::pair<NodeId, SimTime>> buffered_keys_;  // duplicate collapse
  struct Deferred {
    DataPacket packet;
    int ticks = 0;
  };
  std::vector<Deferred> deferred_;

  struct HistoryEntry {
    NodeId sensor;
    SimTime t = 0;
    double value = 0.0;
  };
  std::map<uint32_t, std::deque<HistoryEntry>> history_;  // per cluster
  std::map<NodeId, uint32_t> sensor_cluster_;

  std::map<uint64_t, uint32_t> voted_seq_;                       // height -> last seq voted
  std::map<std::pair<uint64_t, uint32_t>, std::vector<Hash32>> candidate_ids_;
  std::map<std::pair<uint64_t, uint32_t>, BlockHeader> candidate_headers_;
};

BlockHeader make_genesis();

}  // namespace quico
