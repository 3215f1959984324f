#pragma once

#include <set>

#include "quico/messages.hpp"
#include "quico/rng.hpp"

namespace quico {

struct AdversaryConfig {
  double pmn = 0.30;                 // fraction of sensors and gateways turned malicious
  SimTime attack_interval = 10000;   // period of the attack schedule
  SimTime attack_burst = 9000;       // active window inside each period
  double falsification_offset = 75.0;
  bool reselect = true;              // keep the malicious count constant after fixes
  SimTime fix_delay = 500;           // admin turnaround from report to fix

  void validate() const;
};

/// floor(pmn * n) choices, uniform without replacement, deterministic per rng
/// stream.
std::vector<NodeId> select_malicious(const std::vector<NodeId>& candidates, double pmn, Rng& rng);

/// Fault-injection harness: owns the malicious flags, the per-node attack
/// phases, and the administrative detect/fix/reselect loop. Node logic never
/// reads these flags; the harness intercepts behavior from the outside.
class AdversaryState {
 public:
  AdversaryState(AdversaryConfig cfg, std::vector<NodeId> sensors, std::vector<NodeId> gateways,
                 Rng rng);

  bool is_malicious(NodeId node) const { return malicious_.contains(node); }
  /// Malicious and inside its attack burst right now.
  bool attack_active(NodeId node, SimTime now) const;
  const std::set<NodeId>& malicious() const { return malicious_; }
  size_t malicious_gateway_count() const;
  int false_positives() const { return false_positives_; }
  SimTime fix_delay() const { return cfg_.fix_delay; }

  /// Sabotage vote: dispute one valid transaction in the block, attaching a
  /// tampered pending-list version. Returns nothing for empty blocks.
  std::optional<BlockErrorMsg> sabotage_vote(const Block& block, NodeId gw, const KeyPair& key,
                                             SimTime now);

  struct AdminOutcome {
    std::vector<NodeId> fixed;        // confirmed malicious, switched honest
    std::vector<NodeId> reselected;   // flipped malicious to hold pmn
    int false_positives = 0;
  };

  /// Administrative response to a warning report: fix the true positives,
  /// count the false ones, optionally reselect replacements.
  AdminOutcome admin_respond(const WarningReportMsg& report);

 private:
  AdversaryConfig cfg_;
  std::vector<NodeId> gateways_;
  std::set<NodeId> malicious_;
  std::map<NodeId, SimTime> phase_;  // per-node burst phase
  Rng rng_;
  int false_positives_ = 0;
};

}  // namespace quico
