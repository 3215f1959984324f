#pragma once

#include <string>

#include "quico/adversary.hpp"
#include "quico/gateway.hpp"
#include "quico/haps.hpp"

namespace quico {

/// One simulation scenario. Defaults are the desk-scale working point; the
/// full-scale values from the reference deployment are noted in
/// docs/scenario_reference.md and reachable through the same keys.
struct ScenarioConfig {
  // topology
  double map_size_km = 0.664;
  uint32_t stations = 3;
  uint32_t gateways = 9;
  uint32_t sensors = 900;
  uint32_t sensors_per_gateway = 100;
  double station_altitude_km = 20.0;
  double sensor_range_km = 0.1;
  double cluster_link_radius_km = 0.06;
  uint32_t target_cluster_size = 25;
  double ch_uplink_range_km = 0.35;
  double gw_uplink_range_km = 600.0;

  // consensus
  ConsensusMode mode = ConsensusMode::Quico;
  SimTime t_th = 100;
  SimTime t_w = 100;
  uint32_t max_retry_rounds = 3;
  uint32_t service_id = 1;

  // application
  SimTime reading_interval = 10000;
  SimTime aggregation_period = 50;
  SimTime expiry_horizon = 1000;
  SimTime reading_freshness = 1000;
  SimTime neighbor_window = 500;
  double tolerance = 0.5;
  double endorsed_tolerance_factor = 2.0;
  int max_deferral_ticks = 3;
  uint32_t tx_payload_bytes = 1024;

  // environment
  double env_base_value = 20.0;
  double env_sinusoid_amplitude = 0.0;
  double env_spatial_period_km = 1.0;
  double env_noise_amplitude = 0.5;

  // link model
  uint32_t mtu_bytes = 1500;
  uint32_t sensor_mtu_bytes = 127;
  double sensor_bits_per_ms = 250.0;      // 250 kbps radio
  double footprint_bits_per_ms = 8000.0;  // 8 Mbps shared station channel
  double h2h_bits_per_ms = 100000.0;      // 100 Mbps station-to-station links
  double jitter_frac = 0.05;
  SimTime admin_link_delay = 2;

  // energy
  double sensor_energy_budget_j = 1000.0;
  double tx_uj_per_byte = 1.0;
  double rx_uj_per_byte = 1.3;

  // adversary
  AdversaryConfig adversary;

  // run
  SimTime sim_time = 10000;
  uint64_t seed = 1;
  bool blockchain_enabled = true;

  void validate() const;

  ConsensusParams consensus_params() const;
  GatewayOptions gateway_options() const;
  StationOptions station_options() const;
  EnvModel env_model() const;
};

/// Parses a JSON scenario file. Missing keys take defaults; unknown keys are
/// rejected. Throws Error("ConfigNotFound") / Error("ConfigInvalid").
ScenarioConfig parse_config_file(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text);

/// Serialized form that parse_config_text round-trips exactly.
std::string emit_config(const ScenarioConfig& cfg);

}  // namespace quico
