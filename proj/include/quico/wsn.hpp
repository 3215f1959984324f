#pragma once

#include <optional>
#include <variant>

#include "quico/crypto.hpp"
#include "quico/env_model.hpp"
#include "quico/types.hpp"

namespace quico {

/// Geographic sensor cluster. The head forwards all traffic out of the
/// cluster; intra_routes[i] is member i's relay path ending at the head
/// (empty for the head itself).
struct Cluster {
  uint32_t id = 0;
  NodeId head;
  std::vector<NodeId> members;
  std::vector<std::vector<NodeId>> intra_routes;  // parallel to members
  NodeId uplink;  // serving gateway, or the next cluster head toward it

  const std::vector<NodeId>& route_of(NodeId member) const;
};

struct DataPacket {
  std::vector<Reading> readings;
  NodeId sender;
  Signature sender_signature;          // over packet_preimage(readings, sender)
  std::vector<Endorsement> endorsements;
  std::vector<NodeId> hop_trace;       // relays the packet passed through, in order

  bool operator==(const DataPacket&) const = default;
};

Bytes packet_preimage(const std::vector<Reading>& readings, NodeId sender);

void encode(Encoder& e, const DataPacket& v);
DataPacket decode_data_packet(Decoder& d);

/// One sensed reading. A malicious sensor displaces the truth by
/// `falsification_offset` and marks the secret flag for the metrics pipeline.
Reading generate_reading(NodeId node, const Vec2& pos, SimTime now, const EnvModel& env,
                         bool malicious, double falsification_offset, size_t payload_size,
                         Rng& rng);

DataPacket make_packet(const Reading& reading, const KeyPair& sender_key);

enum class EndorseOutcome : uint8_t {
  Endorsed,            // signature valid, data consistent with our own reading
  ForwardUnendorsed,   // data deviates beyond tolerance; forwarded without our endorsement
  Reject,              // bad signature
};

/// In-path validation at relay `at`. `local_value` is the relay's own
/// contemporaneous observation of the same field. On Endorsed the relay's
/// endorsement is appended; the hop trace records the relay either way.
/// Throws Error("MalformedPacket") for packets with no readings.
EndorseOutcome validate_and_endorse(DataPacket& packet, const KeyPair& at_key,
                                    const Bytes& sender_public_key, double local_value,
                                    double tolerance);

/// Relative deviation used by endorsement and gateway anomaly checks.
double relative_deviation(double value, double reference);

/// True iff the trace is non-empty and every traced hop endorsed.
bool fully_endorsed(const DataPacket& packet);

struct ClusteringOptions {
  double link_radius_km = 0.06;     // sensors closer than this are groupable
  double sensor_range_km = 0.1;     // hop range for intra-cluster routes
  size_t target_cluster_size = 25;  // oversized components are subdivided
};

/// Groups sensors into clusters: range-connected components, large ones
/// subdivided geographically; head = member nearest the cluster centroid
/// (ties to the lowest index); routes = shortest hop paths to the head.
/// Throws Error("DisconnectedSensor") when a member cannot reach its head.
std::vector<Cluster> build_cluster_topology(
    const std::vector<std::pair<NodeId, Vec2>>& sensor_positions,
    const ClusteringOptions& opts, Rng& rng);

}  // namespace quico
