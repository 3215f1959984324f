#include "quico/gateway.hpp"

#include <algorithm>

namespace quico {

void ConsensusParams::validate() const {
  if (X < 1) throw Error("ConfigInvalid", "consensus.stations");
  if (Y < 1) throw Error("ConfigInvalid", "consensus.gateways");
  if (t_th <= 0) throw Error("ConfigInvalid", "consensus.t_th");
  if (t_w <= 0) throw Error("ConfigInvalid", "consensus.t_w");
}

const char* discard_reason_name(DiscardReason r) {
  switch (r) {
    case DiscardReason::None: return "none";
    case DiscardReason::BadSignature: return "bad_signature";
    case DiscardReason::Stale: return "stale";
    case DiscardReason::Anomalous: return "anomalous";
    case DiscardReason::NoComparables: return "no_comparables";
  }
  return "?";
}

BlockHeader make_genesis() {
  BlockHeader g;
  g.height = 0;
  g.sequence_number = 0;
  g.previous_hash = kZeroHash;
  g.merkle_root = empty_body_root();
  g.timestamp = 0;
  g.creator = NodeId{Role::HapsStation, 0};
  return g;
}

bool HeaderChain::try_append(const BlockHeader& h) {
  if (h.height != tip_height() + 1) return false;
  if (h.previous_hash != tip_hash()) return false;
  headers_.push_back(h);
  return true;
}

GatewayState::GatewayState(NodeId id, KeyPair key, const KeyRegistry* registry,
                           ConsensusParams params, GatewayOptions opts, BlockHeader genesis)
    : id_(id),
      key_(std::move(key)),
      registry_(registry),
      params_(params),
      opts_(opts),
      chain_(std::move(genesis)) {}

void GatewayState::set_sensor_cluster(NodeId sensor, uint32_t cluster) {
  sensor_cluster_[sensor] = cluster;
}

bool GatewayState::same_transaction(const Transaction& a, const Transaction& b) {
  return a.id == b.id && a.creator_signature == b.creator_signature &&
         transaction_preimage(a) == transaction_preimage(b);
}

void GatewayState::remember_reading(const Reading& r) {
  auto it = sensor_cluster_.find(r.sensor);
  uint32_t cluster = it == sensor_cluster_.end() ? UINT32_MAX : it->second;
  history_[cluster].push_back({r.sensor, r.timestamp, r.ground_truth_value});
}

void GatewayState::sweep_history(SimTime now) {
  SimTime horizon = 4 * opts_.neighbor_window;
  for (auto& [cluster, entries] : history_) {
    while (!entries.empty() && entries.front().t < now - horizon) entries.pop_front();
  }
}

std::optional<double> GatewayState::neighbor_median(const Reading& r, SimTime now) const {
  auto cit = sensor_cluster_.find(r.sensor);
  uint32_t cluster = cit == sensor_cluster_.end() ? UINT32_MAX : cit->second;
  auto hit = history_.find(cluster);
  if (hit == history_.end()) return std::nullopt;
  std::vector<double> values;
  for (const auto& e : hit->second) {
    if (e.sensor == r.sensor) continue;  // the sender cannot vouch for itself
    if (e.t < now - opts_.neighbor_window || e.t > now + opts_.neighbor_window) continue;
    values.push_back(e.value);
  }
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

IngestResult GatewayState::evaluate_packet(const DataPacket& packet, SimTime now,
                                           bool defer_allowed) {
  const bool trusted = opts_.endorsement_trust && fully_endorsed(packet);
  double tol = trusted ? opts_.tolerance * opts_.endorsed_tolerance_factor : opts_.tolerance;

  double worst = 0.0;
  bool have_median = false;
  for (const auto& r : packet.readings) {
    auto median = neighbor_median(r, now);
    if (!median) continue;
    have_median = true;
    worst = std::max(worst, relative_deviation(r.ground_truth_value, *median));
  }

  if (!have_median) {
    if (trusted) return {IngestOutcome::Accepted, DiscardReason::None};
    if (defer_allowed) return {IngestOutcome::Deferred, DiscardReason::None};
    return {IngestOutcome::Discarded, DiscardReason::NoComparables};
  }
  if (worst > tol) return {IngestOutcome::Discarded, DiscardReason::Anomalous};
  return {IngestOutcome::Accepted, DiscardReason::None};
}

void GatewayState::accept_packet(const DataPacket& packet, SimTime now) {
  for (const auto& r : packet.readings) {
    auto key = std::make_pair(r.sensor, r.timestamp);
    if (!buffered_keys_.insert(key).second) continue;  // duplicate record
    buffer_.push_back(r);
    remember_reading(r);
  }
  sweep_history(now);
}

IngestResult GatewayState::ingest_packet(const DataPacket& packet, SimTime now) {
  if (packet.readings.empty()) throw Error("MalformedPacket", "packet carries no readings");

  Bytes preimage = packet_preimage(packet.readings, packet.sender);
  if (packet.sender_signature.signer != packet.sender ||
      !registry_->verify_signed(BytesView{preimage.data(), preimage.size()},
                                packet.sender_signature)) {
    return {IngestOutcome::Discarded, DiscardReason::BadSignature};
  }
  for (const auto& en : packet.endorsements) {
    if (en.signature.signer != en.endorser ||
        !registry_->verify_signed(BytesView{preimage.data(), preimage.size()}, en.signature)) {
      return {IngestOutcome::Discarded, DiscardReason::BadSignature};
    }
  }

  for (const auto& r : packet.readings) {
    if (r.timestamp < now - opts_.reading_freshness) {
      return {IngestOutcome::Discarded, DiscardReason::Stale};
    }
  }

  IngestResult res = evaluate_packet(packet, now, /*defer_allowed=*/true);
  if (res.outcome == IngestOutcome::Accepted) {
    accept_packet(packet, now);
  } else if (res.outcome == IngestOutcome::Deferred) {
    deferred_.push_back({packet, 0});
  }
  return res;
}

AggregateResult GatewayState::aggregate(SimTime now) {
  AggregateResult out;

  // expiry sweep runs before anything else at this tick
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (it->second.tx.expiry_deadline <= now) {
      out.expired.push_back(it->second.tx);
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }

  // deferred packets get another look now that more neighbors may be buffered
  std::vector<Deferred> keep;
  for (auto& d : deferred_) {
    IngestResult res = evaluate_packet(d.packet, now, /*defer_allowed=*/true);
    if (res.outcome == IngestOutcome::Deferred) {
      if (++d.ticks >= opts_.max_deferral_ticks) {
        out.deferred_decisions.push_back(
            {std::move(d.packet), {IngestOutcome::Discarded, DiscardReason::NoComparables}});
      } else {
        keep.push_back(std::move(d));
      }
      continue;
    }
    if (res.outcome == IngestOutcome::Accepted) accept_packet(d.packet, now);
    out.deferred_decisions.push_back({std::move(d.packet), res});
  }
  deferred_ = std::move(keep);

  if (buffer_.empty()) return out;

  Transaction tx;
  tx.origin_gateway = id_;
  tx.readings = std::move(buffer_);
  buffer_.clear();
  buffered_keys_.clear();
  std::sort(tx.readings.begin(), tx.readings.end(), [](const Reading& a, const Reading& b) {
    return std::tie(a.sensor, a.timestamp) < std::tie(b.sensor, b.timestamp);
  });
  tx.creation_timestamp = now;
  tx.expiry_deadline = now + opts_.expiry_horizon;
  tx.service_id = opts_.service_id;
  tx.id = transaction_id(tx);
  Bytes preimage = transaction_preimage(tx);
  tx.creator_signature = sign(BytesView{preimage.data(), preimage.size()}, key_);

  pending_[tx.id] = PendingEntry{tx, now};
  out.txs.push_back(std::move(tx));
  return out;
}

bool GatewayState::validate_transaction_sigs(const Transaction& tx) const {
  if (transaction_id(tx) != tx.id) return false;
  if (tx.creator_signature.signer != tx.origin_gateway) return false;
  Bytes preimage = transaction_preimage(tx);
  if (!registry_->verify_signed(BytesView{preimage.data(), preimage.size()},
                                tx.creator_signature)) {
    return false;
  }
  Bytes en_preimage = endorsement_preimage(tx.id);
  for (const auto& en : tx.endorsements) {
    if (en.signature.signer != en.endorser) return false;
    if (!registry_->verify_signed(BytesView{en_preimage.data(), en_preimage.size()},
                                  en.signature)) {
      return false;
    }
  }
  return true;
}

bool GatewayState::adopt_forwarded(Transaction& tx, SimTime now) {
  if (!validate_transaction_sigs(tx)) return false;
  if (tx.expiry_deadline <= now) return false;
  Endorsement en;
  en.endorser = id_;
  Bytes preimage = endorsement_preimage(tx.id);
  en.signature = sign(BytesView{preimage.data(), preimage.size()}, key_);
  tx.endorsements.push_back(en);
  pending_[tx.id] = PendingEntry{tx, now};
  return true;
}

OnBlockResult GatewayState::on_new_block(const Block& block, SimTime now) {
  (void)now;
  OnBlockResult out;
  const BlockHeader& h = block.header;

  if (h.height != chain_.tip_height() + 1) {
    out.kind = OnBlockKind::HeightMismatch;
    return out;
  }

  Hash32 digest = header_hash(h);
  BlockErrorMsg err;
  err.height = h.height;
  err.seq = h.sequence_number;
  err.voter = id_;

  bool structural_ok =
      h.previous_hash == chain_.tip_hash() && h.merkle_root == body_merkle_root(block.body) &&
      std::is_sorted(block.body.begin(), block.body.end(),
                     [](const auto& a, const auto& b) { return body_order_less(a, b); });
  if (structural_ok) {
    for (const auto& tx : block.body) {
      if (transaction_id(tx) != tx.id) {
        structural_ok = false;
        break;
      }
    }
  }
  if (!structural_ok) {
    Bytes pre = vote_preimage(h.height, h.sequence_number, digest, id_);
    err.structural = true;
    err.signature = sign(BytesView{pre.data(), pre.size()}, key_);
    out.kind = OnBlockKind::Error;
    out.error = std::move(err);
    voted_seq_[h.height] = h.sequence_number;
    return out;
  }

  for (const auto& tx : block.body) {
    auto it = pending_.find(tx.id);
    if (it == pending_.end()) continue;  // not ours to check
    if (!same_transaction(tx, it->second.tx)) {
      DisputedTx dt;
      dt.id = tx.id;
      dt.claimed = it->second.tx;
      err.disputes.push_back(std::move(dt));
    }
  }

  voted_seq_[h.height] = h.sequence_number;
  auto key = std::make_pair(h.height, h.sequence_number);
  auto& ids = candidate_ids_[key];
  ids.clear();
  ids.reserve(block.body.size());
  for (const auto& tx : block.body) ids.push_back(tx.id);
  candidate_headers_[key] = h;

  if (!err.disputes.empty()) {
    Bytes pre = vote_preimage(h.height, h.sequence_number, digest, id_);
    err.signature = sign(BytesView{pre.data(), pre.size()}, key_);
    out.kind = OnBlockKind::Error;
    out.error = std::move(err);
    return out;
  }

  out.kind = OnBlockKind::Ack;
  out.ack.height = h.height;
  out.ack.seq = h.sequence_number;
  out.ack.header_digest = digest;
  out.ack.voter = id_;
  Bytes pre = vote_preimage(h.height, h.sequence_number, digest, id_);
  out.ack.signature = sign(BytesView{pre.data(), pre.size()}, key_);
  return out;
}

ErrorResolveMsg GatewayState::on_error_check(const ErrorCheckMsg& check) {
  ErrorResolveMsg res;
  res.height = check.height;
  res.seq = check.seq;
  res.tx_id = check.tx_id;
  res.voter = id_;

  auto it = pending_.find(check.tx_id);
  if (it == pending_.end()) {
    res.verdict = Verdict::Expired;
  } else if (same_transaction(it->second.tx, check.version_block)) {
    res.verdict = Verdict::VersionBlock;
  } else if (check.version_claimed && same_transaction(it->second.tx, *check.version_claimed)) {
    res.verdict = Verdict::VersionClaimed;
  } else {
    res.verdict = Verdict::Unknown;
  }
  Bytes pre = resolve_preimage(res.height, res.seq, res.tx_id, res.verdict, id_);
  res.signature = sign(BytesView{pre.data(), pre.size()}, key_);
  return res;
}

std::optional<BlockAckMsg> GatewayState::on_decision_notice(const DecisionNoticeMsg& notice) {
  auto it = pending_.find(notice.tx_id);
  bool adjusted = false;
  if (notice.adopted) {
    if (it != pending_.end() && !same_transaction(it->second.tx, *notice.adopted)) {
      it->second.tx = *notice.adopted;
      adjusted = true;
    }
  } else if (it != pending_.end()) {
    pending_.erase(it);  // dropped by the creator as unresolvable
    adjusted = true;
  }
  if (!adjusted) return std::nullopt;

  auto hit = candidate_headers_.find({notice.height, notice.seq});
  if (hit == candidate_headers_.end()) return std::nullopt;
  BlockAckMsg ack;
  ack.height = notice.height;
  ack.seq = notice.seq;
  ack.header_digest = header_hash(hit->second);
  ack.voter = id_;
  Bytes pre = vote_preimage(ack.height, ack.seq, ack.header_digest, id_);
  ack.signature = sign(BytesView{pre.data(), pre.size()}, key_);
  return ack;
}

void GatewayState::apply_confirmed_ids(const std::vector<Hash32>& ids) {
  for (const auto& id : ids) pending_.erase(id);
}

void GatewayState::prune_round_state(uint64_t below_height) {
  candidate_ids_.erase(candidate_ids_.begin(), candidate_ids_.lower_bound({below_height, 0}));
  candidate_headers_.erase(candidate_headers_.begin(),
                           candidate_headers_.lower_bound({below_height, 0}));
  voted_seq_.erase(voted_seq_.begin(), voted_seq_.lower_bound(below_height));
}

ConfirmApply GatewayState::on_block_confirm(const BlockConfirmMsg& confirm) {
  const BlockHeader& h = confirm.header;
  if (h.height != chain_.tip_height() + 1 || h.previous_hash != chain_.tip_hash()) {
    return ConfirmApply::HeightMismatch;
  }

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
  if (hacks.size() < params_.hack_quorum() || gacks.size() < params_.gack_quorum()) {
    return ConfirmApply::InvalidConfirm;
  }

  chain_.try_append(h);
  auto it = candidate_ids_.find({h.height, h.sequence_number});
  if (it != candidate_ids_.end()) apply_confirmed_ids(it->second);
  prune_round_state(h.height + 1);
  return ConfirmApply::Applied;
}

ConfirmApply GatewayState::on_commit_certificate(const CommitCertificateMsg& cert) {
  const BlockHeader& h = cert.header;
  if (h.height != chain_.tip_height() + 1 || h.previous_hash != chain_.tip_hash()) {
    return ConfirmApply::HeightMismatch;
  }
  Hash32 digest = header_hash(h);
  std::set<NodeId> stations, gateways;
  for (const auto& c : cert.commits) {
    if (c.height != h.height || c.seq != h.sequence_number || c.header_digest != digest) continue;
    if (c.signature.signer != c.voter) continue;
    Bytes pre = vote_preimage(c.height, c.seq, c.header_digest, c.voter, /*commit_phase=*/true);
    if (!registry_->verify_signed(BytesView{pre.data(), pre.size()}, c.signature)) continue;
    if (c.voter.role == Role::HapsStation) stations.insert(c.voter);
    if (c.voter.role == Role::Gateway) gateways.insert(c.voter);
  }
  uint32_t f = (params_.Y - 1) / 3;
  if (stations.size() < params_.X || gateways.size() < 2 * f + 1) {
    return ConfirmApply::InvalidConfirm;
  }
  chain_.try_append(h);
  auto it = candidate_ids_.find({h.height, h.sequence_number});
  if (it != candidate_ids_.end()) apply_confirmed_ids(it->second);
  prune_round_state(h.height + 1);
  return ConfirmApply::Applied;
}

UserReply GatewayState::endorse_user_reply(const Transaction& tx, const MerkleProof& proof,
                                           uint64_t header_height) const {
  const auto& headers = chain_.headers();
  if (header_height >= headers.size()) {
    throw Error("UnknownHeader", "no header at height " + std::to_string(header_height));
  }
  UserReply reply;
  if (!validate_transaction_sigs(tx)) return reply;  // Reject
  if (!merkle_verify(tx.id, proof, headers[header_height].merkle_root)) return reply;
  reply.endorsed = true;
  Bytes pre = endorsement_preimage(tx.id);
  reply.signature = sign(BytesView{pre.data(), pre.size()}, key_);
  return reply;
}

HeaderSyncResponseMsg GatewayState::on_header_sync_request(const HeaderSyncRequestMsg& req) const {
  HeaderSyncResponseMsg resp;
  const auto& headers = chain_.headers();
  for (uint64_t h = req.from_height; h < headers.size(); ++h) resp.headers.push_back(headers[h]);
  return resp;
}

void GatewayState::on_header_sync_response(const HeaderSyncResponseMsg& resp) {
  for (const auto& h : resp.headers) chain_.try_append(h);
}

}  // namespace quico
