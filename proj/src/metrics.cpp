#include "quico/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>

namespace quico {

std::optional<double> compute_adr(const EventLog& log) {
  std::vector<SimTime> malicious_times;
  for (const auto& g : log.readings_generated) {
    if (g.malicious) malicious_times.push_back(g.t);
  }
  if (malicious_times.empty()) return std::nullopt;
  std::sort(malicious_times.begin(), malicious_times.end());

  // per block: malicious readings that got in, over malicious readings
  // generated in the block's window; averaged, then inverted
  double ratio_sum = 0.0;
  size_t windows = 0;
  for (const auto& b : log.blocks_decided) {
    auto lo = std::upper_bound(malicious_times.begin(), malicious_times.end(), b.window_start);
    auto hi = std::upper_bound(malicious_times.begin(), malicious_times.end(), b.window_end);
    size_t generated = static_cast<size_t>(hi - lo);
    if (generated == 0) continue;
    double ratio = static_cast<double>(b.malicious_readings) / static_cast<double>(generated);
    ratio_sum += std::min(ratio, 1.0);
    ++windows;
  }
  if (windows == 0) return std::nullopt;
  return 1.0 - ratio_sum / static_cast<double>(windows);
}

std::optional<double> compute_mgdr(const EventLog& log) {
  if (log.sabotage_actions.empty()) return std::nullopt;
  std::set<std::pair<NodeId, uint64_t>> detected;
  for (const auto& d : log.detections) detected.insert({d.gw, d.height});
  size_t hit = 0;
  for (const auto& s : log.sabotage_actions) {
    if (detected.contains({s.gw, s.height})) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(log.sabotage_actions.size());
}

static double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t idx = static_cast<size_t>(std::ceil(p * static_cast<double>(v.size())));
  if (idx > 0) --idx;
  if (idx >= v.size()) idx = v.size() - 1;
  return v[idx];
}

MetricsReport finalize(const EventLog& log, const ScenarioConfig& cfg,
                       double mean_sensor_energy_j) {
  MetricsReport r;
  double seconds = static_cast<double>(cfg.sim_time) / 1000.0;
  if (seconds <= 0) seconds = 1e-9;

  // generation-time lookup for latency samples
  std::map<std::pair<NodeId, SimTime>, SimTime> sent_at;
  for (const auto& g : log.readings_generated) sent_at[{g.sensor, g.t}] = g.t;

  std::vector<double> tla;
  uint64_t confirmed_readings = 0;
  for (const auto& b : log.blocks_decided) {
    confirmed_readings += b.body_readings;
    for (const auto& key : b.reading_keys) {
      auto it = sent_at.find(key);
      if (it == sent_at.end()) continue;
      tla.push_back(static_cast<double>(b.t - it->second));
    }
  }

  // consensus time: first broadcast of a height to its last honest append,
  // counted only when every station appended
  std::map<uint64_t, SimTime> first_broadcast;
  for (const auto& bb : log.block_broadcasts) {
    auto [it, fresh] = first_broadcast.emplace(bb.height, bb.t);
    if (!fresh) it->second = std::min(it->second, bb.t);
  }
  std::map<uint64_t, std::pair<SimTime, uint32_t>> appends;  // height -> (max t, count)
  for (const auto& a : log.station_appends) {
    auto& slot = appends[a.height];
    slot.first = std::max(slot.first, a.t);
    slot.second += 1;
  }
  std::vector<double> ct;
  for (const auto& [height, slot] : appends) {
    if (slot.second < cfg.stations) continue;
    auto fb = first_broadcast.find(height);
    if (fb == first_broadcast.end()) continue;
    ct.push_back(static_cast<double>(slot.first - fb->second));
  }

  uint64_t tx_confirmed = 0;
  for (const auto& b : log.blocks_decided) tx_confirmed += b.body_txs;

  r.bth_tx_per_s = static_cast<double>(tx_confirmed) / seconds;
  r.bth_readings_per_s = static_cast<double>(confirmed_readings) / seconds;
  if (!tla.empty()) {
    double sum = 0.0;
    for (double v : tla) sum += v;
    r.tla_mean_ms = sum / static_cast<double>(tla.size());
    r.tla_p50_ms = percentile(tla, 0.50);
    r.tla_p95_ms = percentile(tla, 0.95);
  }
  if (!ct.empty()) {
    double sum = 0.0;
    for (double v : ct) sum += v;
    r.ct_mean_ms = sum / static_cast<double>(ct.size());
  }
  r.adr = compute_adr(log);
  r.mgdr = compute_mgdr(log);

  double nodes = static_cast<double>(cfg.sensors) + static_cast<double>(cfg.gateways);
  r.nt_data = static_cast<double>(log.data_sent + log.data_forwarded + log.data_received) /
              (nodes * seconds);
  r.nt_control =
      static_cast<double>(log.control_sent + log.control_forwarded + log.control_received) /
      (nodes * seconds);
  r.energy_per_sensor_j = mean_sensor_energy_j;
  r.false_positive_count = log.false_positives;

  r.readings_generated = log.readings_generated.size();
  r.readings_confirmed = confirmed_readings;
  for (const auto& g : log.readings_generated) {
    if (g.malicious) ++r.malicious_generated;
  }
  r.txs_created = log.txs_created.size();
  r.txs_confirmed = tx_confirmed;
  r.txs_expired = log.txs_expired.size();
  r.blocks_confirmed = log.blocks_decided.size();
  r.rounds_rejected = log.rounds_rejected;
  r.invalid_txs_dropped = log.invalid_txs_dropped;
  r.warning_reports = log.warning_reports;
  r.confirm_fraction = r.txs_created == 0 ? 0.0
                                          : static_cast<double>(tx_confirmed) /
                                                static_cast<double>(r.txs_created);
  r.max_message_delay_ms = log.max_message_delay;
  r.completed_early = log.completed_early;
  return r;
}

std::string MetricsReport::to_json(const ScenarioConfig& cfg) const {
  nlohmann::ordered_json j;
  j["config"] = {{"mode", cfg.mode == ConsensusMode::Quico ? "quico" : "pbft_baseline"},
                 {"seed", cfg.seed},
                 {"sim_time_ms", cfg.sim_time},
                 {"stations", cfg.stations},
                 {"gateways", cfg.gateways},
                 {"sensors", cfg.sensors},
                 {"tx_payload_bytes", cfg.tx_payload_bytes},
                 {"pmn", cfg.adversary.pmn},
                 {"blockchain_enabled", cfg.blockchain_enabled}};
  j["metrics"] = {
      {"bth_tx_per_s", bth_tx_per_s},
      {"bth_readings_per_s", bth_readings_per_s},
      {"tla_mean_ms", tla_mean_ms},
      {"tla_p50_ms", tla_p50_ms},
      {"tla_p95_ms", tla_p95_ms},
      {"ct_mean_ms", ct_mean_ms},
      {"adr", adr ? nlohmann::ordered_json(*adr) : nlohmann::ordered_json(nullptr)},
      {"mgdr", mgdr ? nlohmann::ordered_json(*mgdr) : nlohmann::ordered_json(nullptr)},
      {"nt_data_pkt_per_node_s", nt_data},
      {"nt_control_pkt_per_node_s", nt_control},
      {"energy_per_sensor_j", energy_per_sensor_j},
      {"false_positive_count", false_positive_count}};
  j["counts"] = {{"readings_generated", readings_generated},
                 {"readings_confirmed", readings_confirmed},
                 {"malicious_generated", malicious_generated},
                 {"txs_created", txs_created},
                 {"txs_confirmed", txs_confirmed},
                 {"txs_expired", txs_expired},
                 {"blocks_confirmed", blocks_confirmed},
                 {"rounds_rejected", rounds_rejected},
                 {"invalid_txs_dropped", invalid_txs_dropped},
                 {"warning_reports", warning_reports},
                 {"confirm_fraction", confirm_fraction},
                 {"max_message_delay_ms", max_message_delay_ms},
                 {"completed_early", completed_early}};
  return j.dump(2) + "\n";
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  size_t n = xs.size();
  if (n < 2 || ys.size() != n) return 0.0;
  auto ranks = [](const std::vector<double>& v) {
    std::vector<size_t> idx(v.size());
    for (size_t i = 0; i < v.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    size_t i = 0;
    while (i < idx.size()) {
      size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (size_t k = i; k <= j; ++k) rank[idx[k]] = mean_rank;
      i = j + 1;
    }
    return rank;
  };
  std::vector<double> rx = ranks(xs), ry = ranks(ys);
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0, dx = 0, dy = 0;
  for (size_t i = 0; i < n; ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  if (dx == 0 || dy == 0) return 0.0;
  return num / std::sqrt(dx * dy);
}

}  // namespace quico
