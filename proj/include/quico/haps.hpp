#pragma once

#include <map>
#include <set>

#include "quico/gateway.hpp"

namespace quico {

enum class ConsensusMode : uint8_t { Quico = 0, PbftBaseline = 1 };

enum class Phase : uint8_t { Idle, Collecting, Resolving, Confirmed };

enum class VoteEval : uint8_t { Confirm, Resolve, Wait, Escalate };

/// Open dispute over one transaction: the creator's copy against a reporter's
/// claim, arbitrated by the transaction's endorsing gateways.
struct CheckState {
  Transaction version_block;
  std::optional<Transaction> version_claimed;
  std::set<NodeId> reporters;
  std::set<NodeId> targets;
  std::map<NodeId, Verdict> verdicts;
  SimTime opened_at = 0;
};

struct RoundState {
  Phase phase = Phase::Idle;
  Block block;
  SimTime first_broadcast = 0;
  SimTime last_broadcast = 0;
  uint32_t retry_round = 0;
  std::set<NodeId> hacks;
  std::set<NodeId> gacks;
  std::map<NodeId, BlockAckMsg> ack_msgs;
  std::set<NodeId> error_gateways;  // cumulative over the round's lifetime
  std::map<Hash32, CheckState> checks;
  std::vector<std::pair<NodeId, DisputedTx>> unprocessed;  // disputes awaiting resolution
  bool body_dirty = false;
  bool waiting_admin = false;
};

/// Quorum rule: all other stations plus floor(Y/2 + 1) gateways, with no
/// unresolved errors. Pure so it can be checked against a brute-force oracle.
VoteEval collect_votes(const RoundState& round, SimTime now, const ConsensusParams& params);

/// Cyclic creator rotation: the station after `creator` in id order fires at
/// t_b + t_th.
std::pair<NodeId, SimTime> schedule_next_creator(const std::vector<NodeId>& stations,
                                                 NodeId creator, SimTime t_b,
                                                 const ConsensusParams& params);

/// What a station asks the network layer to do after handling an event.
struct StationActions {
  std::vector<std::pair<NodeId, NetPayload>> sends;
  std::vector<NetPayload> broadcasts;  // to every station and gateway
  std::vector<Transaction> replicate;  // pool replication to peer stations (hop-sealed)
  std::vector<WarningReportMsg> warnings;
  std::optional<SimTime> arm_tw_check;
  std::optional<SimTime> arm_creator_timer;
  std::optional<SimTime> arm_reject_check;   // baseline deadline
  std::optional<Block> appended;             // appended locally while handling this event
  std::optional<SimTime> decision_time;      // creator's confirm/certify instant
  bool round_rejected = false;               // baseline t_w expiry without quorum
  uint32_t invalid_tx_dropped = 0;
};

struct StationOptions {
  ConsensusMode mode = ConsensusMode::Quico;
  uint32_t service_id = 1;
  SimTime expiry_horizon = 1000;
  // downlink characteristics, used to pad vote deadlines with the block's
  // own transmission time
  double footprint_bits_per_ms = 8000.0;
  uint32_t mtu_bytes = 1500;
};

/// Full-node behavior: transaction pool replication, round-robin block
/// creation, the QUICO coordinator and voter state machines, and the
/// two-phase baseline used for comparison.
class HapsState {
 public:
  HapsState(NodeId id, KeyPair key, const KeyRegistry* registry, ConsensusParams params,
            std::vector<NodeId> stations, std::vector<NodeId> gateways, StationOptions opts,
            Block genesis);

  NodeId id() const { return id_; }
  const std::vector<Block>& chain() const { return chain_; }
  const std::map<Hash32, PendingEntry>& pool() const { return pool_; }
  const RoundState& round() const { return round_; }
  Hash32 tip_hash() const { return header_hash(chain_.back().header); }
  uint64_t tip_height() const { return chain_.back().header.height; }
  NodeId next_creator_after(NodeId creator) const;

  StationActions on_transaction(const Transaction& tx, NodeId from, SimTime now);
  StationActions on_creator_timer(SimTime now);
  StationActions on_new_block(const Block& block, SimTime now);
  StationActions on_block_ack(const BlockAckMsg& ack, SimTime now);
  StationActions on_block_error(const BlockErrorMsg& err, SimTime now);
  StationActions on_error_resolve(const ErrorResolveMsg& res, SimTime now);
  StationActions on_block_confirm(const BlockConfirmMsg& confirm, SimTime now);
  StationActions on_tw_check(SimTime now);
  StationActions on_admin_fix(const AdminFixMsg& fix, SimTime now);
  StationActions on_header_sync_request(const HeaderSyncRequestMsg& req, SimTime now);

  // baseline handlers
  StationActions on_pre_prepare(const Block& block, SimTime now);
  StationActions on_commit(const CommitMsg& commit, SimTime now);
  StationActions on_commit_certificate(const CommitCertificateMsg& cert, SimTime now);
  StationActions on_reject_check(uint64_t height, SimTime now);

  /// Block body: every unexpired pooled transaction ordered by
  /// (timestamp, id); an empty pool yields an empty body.
  Block create_block(SimTime now);

  /// Validation a non-creator station applies to a proposed block.
  OnBlockResult validate_block(const Block& block, SimTime now);

 private:
  bool validate_transaction(const Transaction& tx, SimTime now) const;
  void open_disputes(StationActions& acts, SimTime now);
  void close_check(const Hash32& tx_id, StationActions& acts, SimTime now);
  void finish_resolution(StationActions& acts, SimTime now);
  void evaluate_round(StationActions& acts, SimTime now);
  void emit_confirm(StationActions& acts, SimTime now);
  void append_block(const Block& block, SimTime now);
  void prune_pool(SimTime now);
  BlockAckMsg make_ack(const BlockHeader& h) const;
  CommitMsg make_commit(const BlockHeader& h) const;
  uint32_t baseline_gateway_quorum() const { return 2 * ((params_.Y - 1) / 3) + 1; }
  SimTime block_airtime(const Block& block) const;

  NodeId id_;
  KeyPair key_;
  const KeyRegistry* registry_;
  ConsensusParams params_;
  std::vector<NodeId> stations_;   // sorted by index
  std::vector<NodeId> gateways_;
  StationOptions opts_;

  std::vector<Block> chain_;
  std::map<Hash32, PendingEntry> pool_;
  RoundState round_;

  std::map<uint64_t, uint32_t> voted_seq_;
  std::map<Hash32, Block> candidates_;  // proposals seen, keyed by header digest

  // baseline bookkeeping (creator side)
  struct CommitRound {
    Hash32 digest{};
    std::set<NodeId> station_commits;
    std::set<NodeId> gateway_commits;
    std::vector<CommitMsg> commit_msgs;
    bool decided = false;
    SimTime deadline = 0;
  };
  std::map<uint64_t, CommitRound> commit_rounds_;  // keyed by height (creator only)

  // every station watches each baseline round so rejection and the follow-up
  // rotation are observed consistently
  struct RoundWatch {
    NodeId creator;
    SimTime deadline = 0;
  };
  std::map<uint64_t, RoundWatch> baseline_watch_;
};

}  // namespace quico
