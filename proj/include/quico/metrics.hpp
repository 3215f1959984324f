#pragma once

#include <optional>
#include <string>

#include "quico/config.hpp"

namespace quico {

/// Append-only record of everything the metrics need. Filled by the event
/// loop; the report is a pure function of this stream.
struct EventLog {
  struct ReadingGen {
    SimTime t = 0;
    NodeId sensor;
    bool malicious = false;
  };
  struct ReadingDrop {
    SimTime t = 0;
    DiscardReason reason = DiscardReason::None;
    bool malicious = false;
  };
  struct TxLifecycle {
    SimTime t = 0;
    uint32_t readings = 0;
  };
  struct BlockBroadcast {
    SimTime t = 0;
    uint64_t height = 0;
    uint32_t seq = 0;
  };
  struct BlockDecided {  // creator confirm/certify instant
    SimTime t = 0;
    uint64_t height = 0;
    SimTime window_start = 0;  // previous block's creation timestamp
    SimTime window_end = 0;    // this block's creation timestamp
    uint32_t body_txs = 0;
    uint32_t body_readings = 0;
    uint32_t malicious_readings = 0;
    std::vector<std::pair<NodeId, SimTime>> reading_keys;  // (sensor, generated_at)
  };
  struct StationAppend {
    SimTime t = 0;
    NodeId station;
    uint64_t height = 0;
  };
  struct Sabotage {
    SimTime t = 0;
    NodeId gw;
    uint64_t height = 0;
  };
  struct Detection {
    SimTime t = 0;
    NodeId gw;
    uint64_t height = 0;
  };

  std::vector<ReadingGen> readings_generated;
  std::vector<ReadingDrop> readings_dropped;
  std::vector<TxLifecycle> txs_created;
  std::vector<TxLifecycle> txs_expired;
  std::vector<BlockBroadcast> block_broadcasts;
  std::vector<BlockDecided> blocks_decided;
  std::vector<StationAppend> station_appends;
  std::vector<Sabotage> sabotage_actions;
  std::vector<Detection> detections;
  uint64_t rounds_rejected = 0;
  uint64_t invalid_txs_dropped = 0;
  uint64_t false_positives = 0;
  uint64_t warning_reports = 0;

  // traffic counters (messages, not segments)
  uint64_t data_sent = 0, data_forwarded = 0, data_received = 0;
  uint64_t control_sent = 0, control_forwarded = 0, control_received = 0;

  // the single largest message latency observed (queueing included)
  SimTime max_message_delay = 0;

  bool completed_early = false;
};

struct MetricsReport {
  double bth_tx_per_s = 0.0;
  double bth_readings_per_s = 0.0;
  double tla_mean_ms = 0.0;
  double tla_p50_ms = 0.0;
  double tla_p95_ms = 0.0;
  double ct_mean_ms = 0.0;
  std::optional<double> adr;
  std::optional<double> mgdr;
  double nt_data = 0.0;     // packets per node per second, sensors + gateways
  double nt_control = 0.0;
  double energy_per_sensor_j = 0.0;
  uint64_t false_positive_count = 0;

  // supporting counts
  uint64_t readings_generated = 0;
  uint64_t readings_confirmed = 0;
  uint64_t malicious_generated = 0;
  uint64_t txs_created = 0;
  uint64_t txs_confirmed = 0;
  uint64_t txs_expired = 0;
  uint64_t blocks_confirmed = 0;
  uint64_t rounds_rejected = 0;
  uint64_t invalid_txs_dropped = 0;
  uint64_t warning_reports = 0;
  double confirm_fraction = 0.0;  // confirmed / created transactions
  SimTime max_message_delay_ms = 0;
  bool completed_early = false;

  std::string to_json(const ScenarioConfig& cfg) const;
};

/// §-style detection-rate computations, exposed for direct testing.
std::optional<double> compute_adr(const EventLog& log);
std::optional<double> compute_mgdr(const EventLog& log);

/// Full report from the event stream. Pure: same log, same report.
MetricsReport finalize(const EventLog& log, const ScenarioConfig& cfg,
                       double mean_sensor_energy_j);

double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace quico
