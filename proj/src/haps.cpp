#include "quico/haps.hpp"

#include <algorithm>

namespace quico {

VoteEval collect_votes(const RoundState& round, SimTime now, const ConsensusParams& params) {
  if (!round.unprocessed.empty()) return VoteEval::Resolve;
  bool resolving = !round.checks.empty();
  bool quorum = round.hacks.size() >= params.hack_quorum() &&
                round.gacks.size() >= params.gack_quorum();
  if (!resolving && quorum) return VoteEval::Confirm;
  if (!resolving && !quorum && !round.waiting_admin &&
      now >= round.last_broadcast + params.t_w && round.error_gateways.size() * 2 > params.Y) {
    return VoteEval::Escalate;
  }
  return VoteEval::Wait;
}

std::pair<NodeId, SimTime> schedule_next_creator(const std::vector<NodeId>& stations,
                                                 NodeId creator, SimTime t_b,
                                                 const ConsensusParams& params) {
  size_t pos = 0;
  for (size_t i = 0; i < stations.size(); ++i) {
    if (stations[i] == creator) {
      pos = i;
      break;
    }
  }
  NodeId next = stations[(pos + 1) % stations.size()];
  return {next, t_b + params.t_th};
}

HapsState::HapsState(NodeId id, KeyPair key, const KeyRegistry* registry, ConsensusParams params,
                     std::vector<NodeId> stations, std::vector<NodeId> gateways,
                     StationOptions opts, Block genesis)
    : id_(id),
      key_(std::move(key)),
      registry_(registry),
      params_(params),
      stations_(std::move(stations)),
      gateways_(std::move(gateways)),
      opts_(opts) {
  std::sort(stations_.begin(), stations_.end());
  std::sort(gateways_.begin(), gateways_.end());
  chain_.push_back(std::move(genesis));
}

NodeId HapsState::next_creator_after(NodeId creator) const {
  return schedule_next_creator(stations_, creator, 0, params_).first;
}

SimTime HapsState::block_airtime(const Block& block) const {
  size_t bytes = wire_size(NetPayload{NewBlockMsg{block}});
  size_t segments = (bytes + opts_.mtu_bytes - 1) / opts_.mtu_bytes;
  double ms = static_cast<double>(segments) *
              (static_cast<double>(opts_.mtu_bytes) * 8.0 / opts_.footprint_bits_per_ms);
  return static_cast<SimTime>(ms) + 1;
}

bool HapsState::validate_transaction(const Transaction& tx, SimTime now) const {
  if (tx.service_id != opts_.service_id) return false;
  if (tx.expiry_deadline <= now) return false;
  if (tx.expiry_deadline <= tx.creation_timestamp) return false;
  if (transaction_id(tx) != tx.id) return false;
  if (tx.creator_signature.signer != tx.origin_gateway) return false;
  Bytes preimage = transaction_preimage(tx);
  if (!registry_->verify_signed(BytesView{preimage.data(), preimage.size()},
                                tx.creator_signature)) {
    return false;
  }
  Bytes en_pre = endorsement_preimage(tx.id);
  for (const auto& en : tx.endorsements) {
    if (en.signature.signer != en.endorser) return false;
    if (!registry_->verify_signed(BytesView{en_pre.data(), en_pre.size()}, en.signature)) {
      return false;
    }
  }
  return true;
}

StationActions HapsState::on_transaction(const Transaction& tx, NodeId from, SimTime now) {
  StationActions acts;
  if (!validate_transaction(tx, now)) {
    acts.invalid_tx_dropped = 1;
    return acts;
  }
  if (pool_.contains(tx.id)) return acts;  // idempotent
  pool_[tx.id] = PendingEntry{tx, now};
  if (from.role == Role::Gateway) acts.replicate.push_back(tx);
  return acts;
}

Block HapsState::create_block(SimTime now) {
  prune_pool(now);
  Block blk;
  blk.header.height = tip_height() + 1;
  blk.header.sequence_number = 0;
  blk.header.previous_hash = tip_hash();
  blk.header.timestamp = now;
  blk.header.creator = id_;
  for (const auto& [id, entry] : pool_) {
    if (entry.tx.expiry_deadline > now) blk.body.push_back(entry.tx);
  }
  std::sort(blk.body.begin(), blk.body.end(), body_order_less);
  blk.header.merkle_root = body_merkle_root(blk.body);
  return blk;
}

StationActions HapsState::on_creator_timer(SimTime now) {
  StationActions acts;
  if (round_.phase == Phase::Collecting || round_.phase == Phase::Resolving) {
    return acts;  // previous round still open; rotation resumes at its confirm
  }
  Block blk = create_block(now);
  round_ = RoundState{};
  round_.phase = Phase::Collecting;
  round_.block = blk;
  round_.first_broadcast = now;
  round_.last_broadcast = now;
  candidates_[header_hash(blk.header)] = blk;

  SimTime airtime = block_airtime(blk);
  if (opts_.mode == ConsensusMode::Quico) {
    round_.last_broadcast = now + airtime;  // votes cannot precede delivery
    acts.broadcasts.push_back(NewBlockMsg{blk});
    acts.arm_tw_check = now + airtime + params_.t_w;
  } else {
    CommitRound cr;
    cr.digest = header_hash(blk.header);
    cr.deadline = now + airtime + params_.t_w;
    cr.station_commits.insert(id_);
    CommitMsg mine = make_commit(blk.header);
    cr.commit_msgs.push_back(mine);
    commit_rounds_[blk.header.height] = std::move(cr);
    baseline_watch_[blk.header.height] = RoundWatch{id_, now + airtime + params_.t_w};
    acts.broadcasts.push_back(PrePrepareMsg{blk});
    acts.broadcasts.push_back(mine);
    acts.arm_reject_check = now + airtime + params_.t_w;
  }
  return acts;
}

BlockAckMsg HapsState::make_ack(const BlockHeader& h) const {
  BlockAckMsg ack;
  ack.height = h.height;
  ack.seq = h.sequence_number;
  ack.header_digest = header_hash(h);
  ack.voter = id_;
  Bytes pre = vote_preimage(ack.height, ack.seq, ack.header_digest, id_);
  ack.signature = sign(BytesView{pre.data(), pre.size()}, key_);
  return ack;
}

CommitMsg HapsState::make_commit(const BlockHeader& h) const {
  CommitMsg c;
  c.height = h.height;
  c.seq = h.sequence_number;
  c.header_digest = header_hash(h);
  c.voter = id_;
  Bytes pre = vote_preimage(c.height, c.seq, c.header_digest, id_, /*commit_phase=*/true);
  c.signature = sign(BytesView{pre.data(), pre.size()}, key_);
  return c;
}

OnBlockResult HapsState::validate_block(const Block& block, SimTime now) {
  OnBlockResult out;
  const BlockHeader& h = block.header;
  if (h.height != tip_height() + 1) {
    out.kind = OnBlockKind::HeightMismatch;
    return out;
  }

  Hash32 digest = header_hash(h);
  BlockErrorMsg err;
  err.height = h.height;
  err.seq = h.sequence_number;
  err.voter = id_;

  bool structural_ok =
      h.previous_hash == tip_hash() && h.merkle_root == body_merkle_root(block.body) &&
      std::is_sorted(block.body.begin(), block.body.end(),
                     [](const auto& a, const auto& b) { return body_order_less(a, b); });
  std::set<Hash32> seen;
  if (structural_ok) {
    for (const auto& tx : block.body) {
      if (transaction_id(tx) != tx.id || !seen.insert(tx.id).second) {
        structural_ok = false;
        break;
      }
    }
  }
  if (structural_ok) {
    for (const auto& prior : chain_) {
      for (const auto& tx : prior.body) {
        if (seen.contains(tx.id)) {
          structural_ok = false;  // duplicate of an already confirmed transaction
          break;
        }
      }
      if (!structural_ok) break;
    }
  }
  if (!structural_ok) {
    err.structural = true;
    Bytes pre = vote_preimage(h.height, h.sequence_number, digest, id_);
    err.signature = sign(BytesView{pre.data(), pre.size()}, key_);
    out.kind = OnBlockKind::Error;
    out.error = std::move(err);
    return out;
  }

  // stations replicate every transaction: each body entry must byte-match the
  // pooled copy; never-seen entries are disputed outright
  for (const auto& tx : block.body) {
    auto it = pool_.find(tx.id);
    if (it == pool_.end()) {
      DisputedTx dt;
      dt.id = tx.id;
      dt.never_received = true;
      err.disputes.push_back(std::move(dt));
      continue;
    }
    if (!GatewayState::same_transaction(tx, it->second.tx)) {
      DisputedTx dt;
      dt.id = tx.id;
      dt.claimed = it->second.tx;
      err.disputes.push_back(std::move(dt));
    }
  }
  if (!err.disputes.empty()) {
    Bytes pre = vote_preimage(h.height, h.sequence_number, digest, id_);
    err.signature = sign(BytesView{pre.data(), pre.size()}, key_);
    out.kind = OnBlockKind::Error;
    out.error = std::move(err);
    return out;
  }

  out.kind = OnBlockKind::Ack;
  out.ack = make_ack(h);
  return out;
}

StationActions HapsState::on_new_block(const Block& block, SimTime now) {
  StationActions acts;
  if (block.header.creator == id_) return acts;
  auto voted = voted_seq_.find(block.header.height);
  if (voted != voted_seq_.end() && block.header.sequence_number < voted->second) {
    return acts;  // stale regeneration
  }
  candidates_[header_hash(block.header)] = block;
  OnBlockResult res = validate_block(block, now);
  if (res.kind == OnBlockKind::HeightMismatch) {
    acts.sends.push_back({block.header.creator, HeaderSyncRequestMsg{tip_height() + 1, id_}});
    return acts;
  }
  voted_seq_[block.header.height] = block.header.sequence_number;
  if (res.kind == OnBlockKind::Ack) {
    acts.sends.push_back({block.header.creator, res.ack});
  } else {
    acts.sends.push_back({block.header.creator, res.error});
  }
  return acts;
}

StationActions HapsState::on_block_ack(const BlockAckMsg& ack, SimTime now) {
  StationActions acts;
  if (round_.phase != Phase::Collecting && round_.phase != Phase::Resolving) return acts;
  const BlockHeader& h = round_.block.header;
  if (ack.height != h.height || ack.seq != h.sequence_number) return acts;
  if (ack.header_digest != header_hash(h)) return acts;
  if (ack.signature.signer != ack.voter) return acts;
  Bytes pre = vote_preimage(ack.height, ack.seq, ack.header_digest, ack.voter);
  if (!registry_->verify_signed(BytesView{pre.data(), pre.size()}, ack.signature)) return acts;

  if (ack.voter.role == Role::HapsStation && ack.voter != id_) {
    round_.hacks.insert(ack.voter);
    round_.ack_msgs[ack.voter] = ack;
  } else if (ack.voter.role == Role::Gateway) {
    round_.gacks.insert(ack.voter);
    round_.ack_msgs[ack.voter] = ack;
  }
  evaluate_round(acts, now);
  return acts;
}

StationActions HapsState::on_block_error(const BlockErrorMsg& err, SimTime now) {
  StationActions acts;
  if (round_.phase != Phase::Collecting && round_.phase != Phase::Resolving) return acts;
  const BlockHeader& h = round_.block.header;
  if (err.height != h.height || err.seq != h.sequence_number) return acts;
  if (err.signature.signer != err.voter) return acts;
  Bytes pre = vote_preimage(err.height, err.seq, header_hash(h), err.voter);
  if (!registry_->verify_signed(BytesView{pre.data(), pre.size()}, err.signature)) return acts;

  // latest message per (voter, height, seq) wins: an error supersedes an ack
  round_.hacks.erase(err.voter);
  round_.gacks.erase(err.voter);
  round_.ack_msgs.erase(err.voter);
  if (err.voter.role == Role::Gateway) round_.error_gateways.insert(err.voter);

  for (const auto& dt : err.disputes) round_.unprocessed.push_back({err.voter, dt});
  // structural errors carry no disputes; they only count toward escalation

  evaluate_round(acts, now);
  return acts;
}

void HapsState::open_disputes(StationActions& acts, SimTime now) {
  round_.phase = Phase::Resolving;
  auto pending = std::move(round_.unprocessed);
  round_.unprocessed.clear();
  for (auto& [reporter, dt] : pending) {
    auto body_it = std::find_if(round_.block.body.begin(), round_.block.body.end(),
                                [&](const Transaction& tx) { return tx.id == dt.id; });
    if (body_it == round_.block.body.end()) {
      // already replaced or dropped in an earlier pass
      DecisionNoticeMsg notice;
      notice.height = round_.block.header.height;
      notice.seq = round_.block.header.sequence_number;
      notice.tx_id = dt.id;
      notice.decision = Verdict::Unknown;
      acts.sends.push_back({reporter, notice});
      continue;
    }

    auto open = round_.checks.find(dt.id);
    if (open != round_.checks.end()) {
      open->second.reporters.insert(reporter);
      continue;
    }

    bool creator_copy_valid = validate_transaction(*body_it, now);
    bool over_retry_budget = round_.retry_round >= params_.max_retry_rounds;
    if (!creator_copy_valid || over_retry_budget) {
      DecisionNoticeMsg notice;
      notice.height = round_.block.header.height;
      notice.seq = round_.block.header.sequence_number;
      notice.tx_id = dt.id;
      if (!creator_copy_valid && dt.claimed && validate_transaction(*dt.claimed, now)) {
        // provably wrong: replace without an ErrorCheck
        *body_it = *dt.claimed;
        notice.decision = Verdict::VersionClaimed;
        notice.adopted = *dt.claimed;
      } else {
        round_.block.body.erase(body_it);
        notice.decision = Verdict::Unknown;  // dropped as unresolved
        WarningReportMsg warn;
        warn.height = notice.height;
        warn.seq = notice.seq;
        warn.suspects.push_back(reporter);
        warn.evidence = "unresolved dispute over " + to_hex(dt.id);
        warn.reporter = id_;
        acts.warnings.push_back(std::move(warn));
      }
      round_.body_dirty = true;
      acts.sends.push_back({reporter, notice});
      continue;
    }

    CheckState check;
    check.version_block = *body_it;
    check.version_claimed = dt.claimed;
    check.reporters.insert(reporter);
    check.opened_at = now;
    check.targets.insert(body_it->origin_gateway);
    for (const auto& en : body_it->endorsements) {
      if (en.endorser.role == Role::Gateway) check.targets.insert(en.endorser);
    }
    ErrorCheckMsg msg;
    msg.height = round_.block.header.height;
    msg.seq = round_.block.header.sequence_number;
    msg.tx_id = dt.id;
    msg.version_block = check.version_block;
    msg.version_claimed = check.version_claimed;
    msg.from = id_;
    for (const auto& target : check.targets) acts.sends.push_back({target, msg});
    round_.checks.emplace(dt.id, std::move(check));
  }
  if (round_.checks.empty() && round_.unprocessed.empty()) finish_resolution(acts, now);
}

void HapsState::close_check(const Hash32& tx_id, StationActions& acts, SimTime now) {
  auto it = round_.checks.find(tx_id);
  if (it == round_.checks.end()) return;
  CheckState check = std::move(it->second);
  round_.checks.erase(it);

  size_t for_block = 0, for_claimed = 0;
  for (const auto& [voter, verdict] : check.verdicts) {
    if (verdict == Verdict::VersionBlock) ++for_block;
    if (verdict == Verdict::VersionClaimed) ++for_claimed;
  }

  DecisionNoticeMsg notice;
  notice.height = round_.block.header.height;
  notice.seq = round_.block.header.sequence_number;
  notice.tx_id = tx_id;

  auto body_it = std::find_if(round_.block.body.begin(), round_.block.body.end(),
                              [&](const Transaction& tx) { return tx.id == tx_id; });

  if (for_block > for_claimed) {
    // the endorsers back the block: discard the error, flag the reporters
    notice.decision = Verdict::VersionBlock;
    if (body_it != round_.block.body.end()) notice.adopted = *body_it;
    WarningReportMsg warn;
    warn.height = notice.height;
    warn.seq = notice.seq;
    warn.suspects.assign(check.reporters.begin(), check.reporters.end());
    warn.evidence = "dispute overruled by endorsers of " + to_hex(tx_id);
    warn.reporter = id_;
    acts.warnings.push_back(std::move(warn));
  } else if (for_claimed > for_block && check.version_claimed) {
    notice.decision = Verdict::VersionClaimed;
    notice.adopted = *check.version_claimed;
    if (body_it != round_.block.body.end()) *body_it = *check.version_claimed;
    round_.body_dirty = true;
  } else {
    // tie, or nothing but Unknown/Expired: drop the transaction
    notice.decision = Verdict::Unknown;
    if (body_it != round_.block.body.end()) {
      round_.block.body.erase(body_it);
      round_.body_dirty = true;
    }
    WarningReportMsg warn;
    warn.height = notice.height;
    warn.seq = notice.seq;
    warn.suspects.assign(check.reporters.begin(), check.reporters.end());
    warn.evidence = "dispute verdicts tied for " + to_hex(tx_id);
    warn.reporter = id_;
    acts.warnings.push_back(std::move(warn));
  }

  // the replies and the decision go back to whoever reported the error
  for (const auto& [voter, verdict] : check.verdicts) {
    ErrorResolveMsg r;
    r.height = notice.height;
    r.seq = notice.seq;
    r.tx_id = tx_id;
    r.verdict = verdict;
    r.voter = voter;
    notice.replies.push_back(r);
  }
  for (const auto& reporter : check.reporters) acts.sends.push_back({reporter, notice});

  if (round_.checks.empty() && round_.unprocessed.empty()) finish_resolution(acts, now);
}

void HapsState::finish_resolution(StationActions& acts, SimTime now) {
  round_.phase = Phase::Collecting;
  if (round_.body_dirty) {
    // regenerate with a new sequence number and collect fresh votes
    round_.retry_round += 1;
    round_.body_dirty = false;
    Block& blk = round_.block;
    blk.header.sequence_number += 1;
    std::sort(blk.body.begin(), blk.body.end(), body_order_less);
    blk.header.merkle_root = body_merkle_root(blk.body);
    round_.hacks.clear();
    round_.gacks.clear();
    round_.ack_msgs.clear();
    SimTime airtime = block_airtime(blk);
    round_.last_broadcast = now + airtime;
    candidates_[header_hash(blk.header)] = blk;
    acts.broadcasts.push_back(NewBlockMsg{blk});
    acts.arm_tw_check = now + airtime + params_.t_w;
  }
  evaluate_round(acts, now);
}

StationActions HapsState::on_error_resolve(const ErrorResolveMsg& res, SimTime now) {
  StationActions acts;
  if (round_.phase != Phase::Resolving) return acts;
  if (res.height != round_.block.header.height ||
      res.seq != round_.block.header.sequence_number) {
    return acts;
  }
  auto it = round_.checks.find(res.tx_id);
  if (it == round_.checks.end()) return acts;
  if (!it->second.targets.contains(res.voter)) return acts;
  if (res.signature.signer != res.voter) return acts;
  Bytes pre = resolve_preimage(res.height, res.seq, res.tx_id, res.verdict, res.voter);
  if (!registry_->verify_signed(BytesView{pre.data(), pre.size()}, res.signature)) return acts;

  it->second.verdicts[res.voter] = res.verdict;
  if (it->second.verdicts.size() == it->second.targets.size()) {
    close_check(res.tx_id, acts, now);
  }
  return acts;
}

void HapsState::evaluate_round(StationActions& acts, SimTime now) {
  if (round_.phase != Phase::Collecting && round_.phase != Phase::Resolving) return;
  VoteEval eval = collect_votes(round_, now, params_);
  switch (eval) {
    case VoteEval::Resolve:
      open_disputes(acts, now);
      break;
    case VoteEval::Confirm:
      emit_confirm(acts, now);
      break;
    case VoteEval::Escalate: {
      WarningReportMsg warn;
      warn.height = round_.block.header.height;
      warn.seq = round_.block.header.sequence_number;
      warn.suspects.assign(round_.error_gateways.begin(), round_.error_gateways.end());
      warn.evidence = "block errors from a gateway majority";
      warn.reporter = id_;
      acts.warnings.push_back(std::move(warn));
      round_.waiting_admin = true;
      break;
    }
    case VoteEval::Wait:
      break;
  }
}

void HapsState::emit_confirm(StationActions& acts, SimTime now) {
  BlockConfirmMsg confirm;
  confirm.header = round_.block.header;
  confirm.t_b = now;
  for (const auto& [voter, ack] : round_.ack_msgs) confirm.votes.push_back(ack);
  acts.broadcasts.push_back(confirm);
  acts.decision_time = now;

  Block block = round_.block;
  append_block(block, now);
  acts.appended = std::move(block);
  round_.phase = Phase::Confirmed;

  auto [next, fire_at] = schedule_next_creator(stations_, id_, now, params_);
  if (next == id_) acts.arm_creator_timer = fire_at;
}

void HapsState::append_block(const Block& block, SimTime now) {
  chain_.push_back(block);
  for (const auto& tx : block.body) pool_.erase(tx.id);
  prune_pool(now);
  candidates_.clear();
  voted_seq_.erase(voted_seq_.begin(), voted_seq_.upper_bound(block.header.height));
  commit_rounds_.erase(commit_rounds_.begin(), commit_rounds_.upper_bound(block.header.height));
  baseline_watch_.erase(baseline_watch_.begin(),
                        baseline_watch_.upper_bound(block.header.height));
}

void HapsState::prune_pool(SimTime now) {
  // hysteresis: keep recently expired entries so a block already in flight
  // can still be byte-checked against them
  SimTime cutoff = now - opts_.expiry_horizon;
  for (auto it = pool_.begin(); it != pool_.end();) {
    if (it->second.tx.expiry_deadline <= cutoff) {
      it = pool_.erase(it);
    } else {
      ++it;
    }
  }
}

StationActions HapsState::on_block_confirm(const BlockConfirmMsg& confirm, SimTime now) {
  StationActions acts;
  const BlockHeader& h = confirm.header;
  if (h.creator == id_) return acts;  // we appended at emit
  if (h.height != tip_height() + 1 || h.previous_hash != tip_hash()) return acts;

  Hash32 digest = header_hash(h);
  std::set<NodeId> hacks, gacks;
  for (const auto& v : confirm.votes) {
    if (v.height != h.height || v.seq != h.sequence_number || v.header_digest != digest) continue;
    if (v.signature.signer != v.voter) continue;
    Bytes pre = vote_preimage(v.height, v.seq, v.header_digest, v.voter);
    if (!registry_->verify_signed(BytesView{pre.data(), pre.size()}, v.signature)) continue;
    if (v.voter.role == Role::HapsStation && v.voter != h.creator) hacks.insert(v.voter);
    if (v.voter.role == Role::Gateway) gacks.insert(v.voter);
  }
  if (hacks.size() < params_.hack_quorum() || gacks.size() < params_.gack_quorum()) return acts;

  auto it = candidates_.find(digest);
  if (it == candidates_.end()) return acts;  // body never seen; links are ordered so this is rare
  Block block = it->second;
  append_block(block, now);
  acts.appended = std::move(block);
  round_ = RoundState{};

  auto [next, fire_at] = schedule_next_creator(stations_, h.creator, confirm.t_b, params_);
  if (next == id_) acts.arm_creator_timer = fire_at;
  return acts;
}

StationActions HapsState::on_tw_check(SimTime now) {
  StationActions acts;
  if (round_.phase == Phase::Resolving) {
    // endorsers that never answered count as Unknown once the window passes
    std::vector<Hash32> stale;
    for (auto& [id, check] : round_.checks) {
      if (now >= check.opened_at + params_.t_w) stale.push_back(id);
    }
    for (const auto& id : stale) {
      auto it = round_.checks.find(id);
      if (it == round_.checks.end()) continue;
      for (const auto& target : it->second.targets) {
        it->second.verdicts.emplace(target, Verdict::Unknown);
      }
      close_check(id, acts, now);
    }
  }
  if (round_.phase == Phase::Collecting) evaluate_round(acts, now);
  if (round_.phase == Phase::Collecting || round_.phase == Phase::Resolving) {
    acts.arm_tw_check = now + params_.t_w;
  }
  return acts;
}

StationActions HapsState::on_admin_fix(const AdminFixMsg& fix, SimTime now) {
  StationActions acts;
  if (round_.phase != Phase::Collecting && round_.phase != Phase::Resolving) return acts;
  if (fix.height != round_.block.header.height) return acts;
  round_.waiting_admin = false;
  round_.last_broadcast = now;
  // resend the pending block to the gateways the administrators fixed
  for (const auto& gw : fix.fixed) {
    acts.sends.push_back({gw, NewBlockMsg{round_.block}});
  }
  acts.arm_tw_check = now + params_.t_w;
  return acts;
}

StationActions HapsState::on_header_sync_request(const HeaderSyncRequestMsg& req, SimTime now) {
  (void)now;
  StationActions acts;
  HeaderSyncResponseMsg resp;
  for (const auto& blk : chain_) {
    if (blk.header.height >= req.from_height) resp.headers.push_back(blk.header);
  }
  acts.sends.push_back({req.requester, std::move(resp)});
  return acts;
}

// ---- two-phase baseline -----------------------------------------------------

StationActions HapsState::on_pre_prepare(const Block& block, SimTime now) {
  StationActions acts;
  if (block.header.creator == id_) return acts;
  candidates_[header_hash(block.header)] = block;
  SimTime deadline = block.header.timestamp + block_airtime(block) + params_.t_w;
  baseline_watch_[block.header.height] = RoundWatch{block.header.creator, deadline};
  acts.arm_reject_check = deadline;
  OnBlockResult res = validate_block(block, now);
  if (res.kind == OnBlockKind::HeightMismatch) {
    acts.sends.push_back({block.header.creator, HeaderSyncRequestMsg{tip_height() + 1, id_}});
    return acts;
  }
  if (res.kind == OnBlockKind::Ack) {
    acts.broadcasts.push_back(make_commit(block.header));
  }
  // an invalid block simply gets no commit from this voter
  return acts;
}

StationActions HapsState::on_commit(const CommitMsg& commit, SimTime now) {
  StationActions acts;
  auto it = commit_rounds_.find(commit.height);
  if (it == commit_rounds_.end()) return acts;  // only the round's primary decides
  CommitRound& cr = it->second;
  if (cr.decided || now >= cr.deadline) return acts;
  if (commit.header_digest != cr.digest || commit.seq != 0) return acts;
  if (commit.signature.signer != commit.voter) return acts;
  Bytes pre = vote_preimage(commit.height, commit.seq, commit.header_digest, commit.voter, true);
  if (!registry_->verify_signed(BytesView{pre.data(), pre.size()}, commit.signature)) return acts;

  bool fresh = false;
  if (commit.voter.role == Role::HapsStation) {
    fresh = cr.station_commits.insert(commit.voter).second;
  } else if (commit.voter.role == Role::Gateway) {
    fresh = cr.gateway_commits.insert(commit.voter).second;
  }
  if (fresh) cr.commit_msgs.push_back(commit);

  if (cr.station_commits.size() >= params_.X &&
      cr.gateway_commits.size() >= baseline_gateway_quorum()) {
    auto cand = candidates_.find(cr.digest);
    if (cand == candidates_.end()) return acts;
    cr.decided = true;
    CommitCertificateMsg cert;
    cert.header = cand->second.header;
    cert.commits = cr.commit_msgs;
    cert.decided_at = now;
    acts.broadcasts.push_back(cert);
    acts.decision_time = now;

    Block block = cand->second;
    append_block(block, now);
    acts.appended = std::move(block);
    round_ = RoundState{};

    auto [next, fire_at] = schedule_next_creator(stations_, id_, now, params_);
    if (next == id_) acts.arm_creator_timer = fire_at;
  }
  return acts;
}

StationActions HapsState::on_commit_certificate(const CommitCertificateMsg& cert, SimTime now) {
  StationActions acts;
  const BlockHeader& h = cert.header;
  if (h.creator == id_) return acts;
  if (h.height != tip_height() + 1 || h.previous_hash != tip_hash()) return acts;

  Hash32 digest = header_hash(h);
  std::set<NodeId> stations, gateways;
  for (const auto& c : cert.commits) {
    if (c.height != h.height || c.seq != h.sequence_number || c.header_digest != digest) continue;
    if (c.signature.signer != c.voter) continue;
    Bytes pre = vote_preimage(c.height, c.seq, c.header_digest, c.voter, true);
    if (!registry_->verify_signed(BytesView{pre.data(), pre.size()}, c.signature)) continue;
    if (c.voter.role == Role::HapsStation) stations.insert(c.voter);
    if (c.voter.role == Role::Gateway) gateways.insert(c.voter);
  }
  if (stations.size() < params_.X || gateways.size() < baseline_gateway_quorum()) return acts;

  auto it = candidates_.find(digest);
  if (it == candidates_.end()) return acts;
  Block block = it->second;
  append_block(block, now);
  acts.appended = std::move(block);

  auto [next, fire_at] = schedule_next_creator(stations_, h.creator, cert.decided_at, params_);
  if (next == id_) acts.arm_creator_timer = fire_at;
  return acts;
}

StationActions HapsState::on_reject_check(uint64_t height, SimTime now) {
  StationActions acts;
  auto watch_it = baseline_watch_.find(height);
  if (watch_it == baseline_watch_.end()) return acts;
  RoundWatch watch = watch_it->second;
  if (now < watch.deadline || tip_height() >= height) return acts;
  baseline_watch_.erase(watch_it);

  // quorum missed within t_w: the block is rejected, its transactions wait
  // for the next one
  auto it = commit_rounds_.find(height);
  if (it != commit_rounds_.end()) {
    if (it->second.decided) return acts;
    acts.round_rejected = true;
    // with a rejecting consensus, the nodes that voted differently (that is,
    // committed) get flagged; the baseline's false deduction
    WarningReportMsg warn;
    warn.height = height;
    warn.seq = 0;
    for (const auto& gw : it->second.gateway_commits) warn.suspects.push_back(gw);
    warn.evidence = "committed a block the network rejected";
    warn.reporter = id_;
    if (!warn.suspects.empty()) acts.warnings.push_back(std::move(warn));
    commit_rounds_.erase(it);
    round_ = RoundState{};
  }

  auto [next, fire_at] = schedule_next_creator(stations_, watch.creator, now, params_);
  if (next == id_) acts.arm_creator_timer = fire_at;
  return acts;
}

}  // namespace quico
