#include "quico/adversary.hpp"

#include <algorithm>

namespace quico {

void AdversaryConfig::validate() const {
  if (pmn < 0.0 || pmn >= 1.0) throw Error("ConfigInvalid", "adversary.pmn");
  if (attack_interval <= 0) throw Error("ConfigInvalid", "adversary.attack_interval");
  if (attack_burst <= 0 || attack_burst > attack_interval) {
    throw Error("ConfigInvalid", "adversary.attack_burst");
  }
}

std::vector<NodeId> select_malicious(const std::vector<NodeId>& candidates, double pmn, Rng& rng) {
  size_t count = static_cast<size_t>(pmn * static_cast<double>(candidates.size()));
  std::vector<NodeId> pool = candidates;
  std::sort(pool.begin(), pool.end());
  // partial Fisher-Yates draw
  std::vector<NodeId> out;
  out.reserve(count);
  for (size_t i = 0; i < count && !pool.empty(); ++i) {
    size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(pool.size()) - 1));
    out.push_back(pool[j]);
    pool.erase(pool.begin() + static_cast<ptrdiff_t>(j));
  }
  std::sort(out.begin(), out.end());
  return out;
}

AdversaryState::AdversaryState(AdversaryConfig cfg, std::vector<NodeId> sensors,
                               std::vector<NodeId> gateways, Rng rng)
    : cfg_(cfg), gateways_(std::move(gateways)), rng_(rng) {
  std::sort(gateways_.begin(), gateways_.end());
  Rng select_rng = rng_.stream("select");
  for (const auto& n : select_malicious(sensors, cfg_.pmn, select_rng)) malicious_.insert(n);
  for (const auto& n : select_malicious(gateways_, cfg_.pmn, select_rng)) malicious_.insert(n);

  Rng phase_rng = rng_.stream("phase");
  auto assign_phase = [&](const std::vector<NodeId>& nodes) {
    for (const auto& n : nodes) {
      phase_[n] = static_cast<SimTime>(phase_rng.uniform_int(0, cfg_.attack_interval - 1));
    }
  };
  assign_phase(sensors);
  assign_phase(gateways_);
}

bool AdversaryState::attack_active(NodeId node, SimTime now) const {
  if (!malicious_.contains(node)) return false;
  auto it = phase_.find(node);
  SimTime phase = it == phase_.end() ? 0 : it->second;
  SimTime pos = (now + phase) % cfg_.attack_interval;
  return pos < cfg_.attack_burst;
}

size_t AdversaryState::malicious_gateway_count() const {
  size_t n = 0;
  for (const auto& gw : gateways_) {
    if (malicious_.contains(gw)) ++n;
  }
  return n;
}

std::optional<BlockErrorMsg> AdversaryState::sabotage_vote(const Block& block, NodeId gw,
                                                           const KeyPair& key, SimTime now) {
  (void)now;
  if (block.body.empty()) return std::nullopt;
  size_t pick =
      static_cast<size_t>(rng_.uniform_int(0, static_cast<int64_t>(block.body.size()) - 1));
  const Transaction& victim = block.body[pick];

  // fabricate a "pending list" version with tampered payload bytes
  Transaction tampered = victim;
  if (!tampered.readings.empty() && !tampered.readings[0].payload.empty()) {
    tampered.readings[0].payload[0] ^= 0x5a;
  } else {
    tampered.creation_timestamp += 1;
  }
  tampered.id = transaction_id(tampered);

  BlockErrorMsg err;
  err.height = block.header.height;
  err.seq = block.header.sequence_number;
  err.voter = gw;
  DisputedTx dt;
  dt.id = victim.id;
  dt.claimed = tampered;
  err.disputes.push_back(std::move(dt));
  Bytes pre = vote_preimage(err.height, err.seq, header_hash(block.header), gw);
  err.signature = sign(BytesView{pre.data(), pre.size()}, key);
  return err;
}

AdversaryState::AdminOutcome AdversaryState::admin_respond(const WarningReportMsg& report) {
  AdminOutcome out;
  for (const auto& suspect : report.suspects) {
    if (malicious_.contains(suspect)) {
      malicious_.erase(suspect);
      out.fixed.push_back(suspect);
    } else {
      ++false_positives_;
      ++out.false_positives;
    }
  }
  if (cfg_.reselect && !out.fixed.empty()) {
    // "other" legitimate gateways: the just-fixed ones are not candidates
    std::vector<NodeId> honest;
    for (const auto& gw : gateways_) {
      if (malicious_.contains(gw)) continue;
      if (std::find(out.fixed.begin(), out.fixed.end(), gw) != out.fixed.end()) continue;
      honest.push_back(gw);
    }
    // only gateways are reselected; sensor fixes are not part of the loop
    std::vector<NodeId> fixed_gateways;
    for (const auto& n : out.fixed) {
      if (n.role == Role::Gateway) fixed_gateways.push_back(n);
    }
    for (size_t i = 0; i < fixed_gateways.size() && !honest.empty(); ++i) {
      size_t j = static_cast<size_t>(rng_.uniform_int(0, static_cast<int64_t>(honest.size()) - 1));
      NodeId chosen = honest[j];
      honest.erase(honest.begin() + static_cast<ptrdiff_t>(j));
      malicious_.insert(chosen);
      out.reselected.push_back(chosen);
    }
  }
  return out;
}

}  // namespace quico
