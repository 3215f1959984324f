#include "quico/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace quico {

using json = nlohmann::ordered_json;

void ScenarioConfig::validate() const {
  auto bad = [](const std::string& field) { throw Error("ConfigInvalid", field); };
  if (map_size_km <= 0) bad("topology.map_size_km");
  if (stations < 1) bad("topology.stations");
  if (gateways < 1) bad("topology.gateways");
  if (sensors < 1) bad("topology.sensors");
  if (sensors_per_gateway < 1) bad("topology.sensors_per_gateway");
  if (sensor_range_km <= 0) bad("topology.sensor_range_km");
  if (target_cluster_size < 1) bad("topology.target_cluster_size");
  if (t_th <= 0) bad("consensus.t_th");
  if (t_w <= 0) bad("consensus.t_w");
  if (reading_interval <= 0) bad("application.reading_interval");
  if (aggregation_period <= 0) bad("application.aggregation_period");
  if (expiry_horizon <= 0) bad("application.expiry_horizon");
  if (tolerance <= 0) bad("application.tolerance");
  if (tx_payload_bytes < 1) bad("application.tx_payload_bytes");
  if (mtu_bytes < 64) bad("link.mtu_bytes");
  if (sensor_mtu_bytes < 16) bad("link.sensor_mtu_bytes");
  if (sensor_bits_per_ms <= 0 || footprint_bits_per_ms <= 0 || h2h_bits_per_ms <= 0) {
    bad("link.bandwidth");
  }
  if (jitter_frac < 0 || jitter_frac > 1) bad("link.jitter_frac");
  if (sensor_energy_budget_j <= 0) bad("energy.sensor_energy_budget_j");
  if (sim_time < 0) bad("run.sim_time");
  adversary.validate();
}

ConsensusParams ScenarioConfig::consensus_params() const {
  ConsensusParams p;
  p.X = stations;
  p.Y = gateways;
  p.t_th = t_th;
  p.t_w = t_w;
  p.max_retry_rounds = max_retry_rounds;
  return p;
}

GatewayOptions ScenarioConfig::gateway_options() const {
  GatewayOptions o;
  o.service_id = service_id;
  o.aggregation_period = aggregation_period;
  o.expiry_horizon = expiry_horizon;
  o.reading_freshness = reading_freshness;
  o.neighbor_window = neighbor_window;
  o.tolerance = tolerance;
  o.endorsed_tolerance_factor = endorsed_tolerance_factor;
  o.max_deferral_ticks = max_deferral_ticks;
  o.endorsement_trust = mode == ConsensusMode::Quico;
  return o;
}

StationOptions ScenarioConfig::station_options() const {
  StationOptions o;
  o.mode = mode;
  o.service_id = service_id;
  o.expiry_horizon = expiry_horizon;
  o.footprint_bits_per_ms = footprint_bits_per_ms;
  o.mtu_bytes = mtu_bytes;
  return o;
}

EnvModel ScenarioConfig::env_model() const {
  EnvModel e;
  e.base_value = env_base_value;
  e.sinusoid_amplitude = env_sinusoid_amplitude;
  e.spatial_period_km = env_spatial_period_km;
  e.noise_amplitude = env_noise_amplitude;
  return e;
}

namespace {

struct Reader {
  const json& j;
  std::string prefix;

  void check_known(std::initializer_list<const char*> keys) const {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool known = false;
      for (const char* k : keys) {
        if (it.key() == k) {
          known = true;
          break;
        }
      }
      if (!known) throw Error("ConfigInvalid", "unknown key " + prefix + it.key());
    }
  }

  template <typename T>
  void get(const char* key, T& out) const {
    if (!j.contains(key)) return;
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error("ConfigInvalid", prefix + key);
    }
  }
};

}  // namespace

static ScenarioConfig from_json(const json& root) {
  ScenarioConfig cfg;
  if (!root.is_object()) throw Error("ConfigInvalid", "top-level value must be an object");

  for (auto it = root.begin(); it != root.end(); ++it) {
    const std::string& k = it.key();
    if (k != "topology" && k != "consensus" && k != "application" && k != "environment" &&
        k != "link" && k != "energy" && k != "adversary" && k != "run") {
      throw Error("ConfigInvalid", "unknown key " + k);
    }
  }

  if (root.contains("topology")) {
    Reader r{root.at("topology"), "topology."};
    r.check_known({"map_size_km", "stations", "gateways", "sensors", "sensors_per_gateway",
                   "station_altitude_km", "sensor_range_km", "cluster_link_radius_km",
                   "target_cluster_size", "ch_uplink_range_km", "gw_uplink_range_km"});
    r.get("map_size_km", cfg.map_size_km);
    r.get("stations", cfg.stations);
    r.get("gateways", cfg.gateways);
    r.get("sensors", cfg.sensors);
    r.get("sensors_per_gateway", cfg.sensors_per_gateway);
    r.get("station_altitude_km", cfg.station_altitude_km);
    r.get("sensor_range_km", cfg.sensor_range_km);
    r.get("cluster_link_radius_km", cfg.cluster_link_radius_km);
    r.get("target_cluster_size", cfg.target_cluster_size);
    r.get("ch_uplink_range_km", cfg.ch_uplink_range_km);
    r.get("gw_uplink_range_km", cfg.gw_uplink_range_km);
  }
  if (root.contains("consensus")) {
    Reader r{root.at("consensus"), "consensus."};
    r.check_known({"mode", "t_th", "t_w", "max_retry_rounds", "service_id"});
    std::string mode = "quico";
    r.get("mode", mode);
    if (mode == "quico") {
      cfg.mode = ConsensusMode::Quico;
    } else if (mode == "pbft_baseline") {
      cfg.mode = ConsensusMode::PbftBaseline;
    } else {
      throw Error("ConfigInvalid", "consensus.mode");
    }
    r.get("t_th", cfg.t_th);
    r.get("t_w", cfg.t_w);
    r.get("max_retry_rounds", cfg.max_retry_rounds);
    r.get("service_id", cfg.service_id);
  }
  if (root.contains("application")) {
    Reader r{root.at("application"), "application."};
    r.check_known({"reading_interval", "aggregation_period", "expiry_horizon",
                   "reading_freshness", "neighbor_window", "tolerance",
                   "endorsed_tolerance_factor", "max_deferral_ticks", "tx_payload_bytes"});
    r.get("reading_interval", cfg.reading_interval);
    r.get("aggregation_period", cfg.aggregation_period);
    r.get("expiry_horizon", cfg.expiry_horizon);
    r.get("reading_freshness", cfg.reading_freshness);
    r.get("neighbor_window", cfg.neighbor_window);
    r.get("tolerance", cfg.tolerance);
    r.get("endorsed_tolerance_factor", cfg.endorsed_tolerance_factor);
    r.get("max_deferral_ticks", cfg.max_deferral_ticks);
    r.get("tx_payload_bytes", cfg.tx_payload_bytes);
  }
  if (root.contains("environment")) {
    Reader r{root.at("environment"), "environment."};
    r.check_known({"base_value", "sinusoid_amplitude", "spatial_period_km", "noise_amplitude"});
    r.get("base_value", cfg.env_base_value);
    r.get("sinusoid_amplitude", cfg.env_sinusoid_amplitude);
    r.get("spatial_period_km", cfg.env_spatial_period_km);
    r.get("noise_amplitude", cfg.env_noise_amplitude);
  }
  if (root.contains("link")) {
    Reader r{root.at("link"), "link."};
    r.check_known({"mtu_bytes", "sensor_mtu_bytes", "sensor_bits_per_ms", "footprint_bits_per_ms",
                   "h2h_bits_per_ms", "jitter_frac", "admin_link_delay"});
    r.get("mtu_bytes", cfg.mtu_bytes);
    r.get("sensor_mtu_bytes", cfg.sensor_mtu_bytes);
    r.get("sensor_bits_per_ms", cfg.sensor_bits_per_ms);
    r.get("footprint_bits_per_ms", cfg.footprint_bits_per_ms);
    r.get("h2h_bits_per_ms", cfg.h2h_bits_per_ms);
    r.get("jitter_frac", cfg.jitter_frac);
    r.get("admin_link_delay", cfg.admin_link_delay);
  }
  if (root.contains("energy")) {
    Reader r{root.at("energy"), "energy."};
    r.check_known({"sensor_energy_budget_j", "tx_uj_per_byte", "rx_uj_per_byte"});
    r.get("sensor_energy_budget_j", cfg.sensor_energy_budget_j);
    r.get("tx_uj_per_byte", cfg.tx_uj_per_byte);
    r.get("rx_uj_per_byte", cfg.rx_uj_per_byte);
  }
  if (root.contains("adversary")) {
    Reader r{root.at("adversary"), "adversary."};
    r.check_known(
        {"pmn", "attack_interval", "attack_burst", "falsification_offset", "reselect",
         "fix_delay"});
    r.get("pmn", cfg.adversary.pmn);
    r.get("attack_interval", cfg.adversary.attack_interval);
    r.get("attack_burst", cfg.adversary.attack_burst);
    r.get("falsification_offset", cfg.adversary.falsification_offset);
    r.get("reselect", cfg.adversary.reselect);
    r.get("fix_delay", cfg.adversary.fix_delay);
  }
  if (root.contains("run")) {
    Reader r{root.at("run"), "run."};
    r.check_known({"sim_time", "seed", "blockchain_enabled"});
    r.get("sim_time", cfg.sim_time);
    r.get("seed", cfg.seed);
    r.get("blockchain_enabled", cfg.blockchain_enabled);
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config_text(const std::string& text) {
  std::string body = text;
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) body = "{}";
  json root;
  try {
    root = json::parse(body);
  } catch (const json::exception& e) {
    throw Error("ConfigInvalid", e.what());
  }
  return from_json(root);
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("ConfigNotFound", path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string emit_config(const ScenarioConfig& cfg) {
  json root;
  root["topology"] = {{"map_size_km", cfg.map_size_km},
                      {"stations", cfg.stations},
                      {"gateways", cfg.gateways},
                      {"sensors", cfg.sensors},
                      {"sensors_per_gateway", cfg.sensors_per_gateway},
                      {"station_altitude_km", cfg.station_altitude_km},
                      {"sensor_range_km", cfg.sensor_range_km},
                      {"cluster_link_radius_km", cfg.cluster_link_radius_km},
                      {"target_cluster_size", cfg.target_cluster_size},
                      {"ch_uplink_range_km", cfg.ch_uplink_range_km},
                      {"gw_uplink_range_km", cfg.gw_uplink_range_km}};
  root["consensus"] = {{"mode", cfg.mode == ConsensusMode::Quico ? "quico" : "pbft_baseline"},
                       {"t_th", cfg.t_th},
                       {"t_w", cfg.t_w},
                       {"max_retry_rounds", cfg.max_retry_rounds},
                       {"service_id", cfg.service_id}};
  root["application"] = {{"reading_interval", cfg.reading_interval},
                         {"aggregation_period", cfg.aggregation_period},
                         {"expiry_horizon", cfg.expiry_horizon},
                         {"reading_freshness", cfg.reading_freshness},
                         {"neighbor_window", cfg.neighbor_window},
                         {"tolerance", cfg.tolerance},
                         {"endorsed_tolerance_factor", cfg.endorsed_tolerance_factor},
                         {"max_deferral_ticks", cfg.max_deferral_ticks},
                         {"tx_payload_bytes", cfg.tx_payload_bytes}};
  root["environment"] = {{"base_value", cfg.env_base_value},
                         {"sinusoid_amplitude", cfg.env_sinusoid_amplitude},
                         {"spatial_period_km", cfg.env_spatial_period_km},
                         {"noise_amplitude", cfg.env_noise_amplitude}};
  root["link"] = {{"mtu_bytes", cfg.mtu_bytes},
                  {"sensor_mtu_bytes", cfg.sensor_mtu_bytes},
                  {"sensor_bits_per_ms", cfg.sensor_bits_per_ms},
                  {"footprint_bits_per_ms", cfg.footprint_bits_per_ms},
                  {"h2h_bits_per_ms", cfg.h2h_bits_per_ms},
                  {"jitter_frac", cfg.jitter_frac},
                  {"admin_link_delay", cfg.admin_link_delay}};
  root["energy"] = {{"sensor_energy_budget_j", cfg.sensor_energy_budget_j},
                    {"tx_uj_per_byte", cfg.tx_uj_per_byte},
                    {"rx_uj_per_byte", cfg.rx_uj_per_byte}};
  root["adversary"] = {{"pmn", cfg.adversary.pmn},
                       {"attack_interval", cfg.adversary.attack_interval},
                       {"attack_burst", cfg.adversary.attack_burst},
                       {"falsification_offset", cfg.adversary.falsification_offset},
                       {"reselect", cfg.adversary.reselect},
                       {"fix_delay", cfg.adversary.fix_delay}};
  root["run"] = {{"sim_time", cfg.sim_time},
                 {"seed", cfg.seed},
                 {"blockchain_enabled", cfg.blockchain_enabled}};
  return root.dump(2) + "\n";
}

}  // namespace quico
