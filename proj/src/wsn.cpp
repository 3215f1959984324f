#include "quico/wsn.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

namespace quico {

const std::vector<NodeId>& Cluster::route_of(NodeId member) const {
  for (size_t i = 0; i < members.size(); ++i) {
    if (members[i] == member) return intra_routes[i];
  }
  throw Error("UnknownNode", to_string(member) + " is not in cluster " + std::to_string(id));
}

Bytes packet_preimage(const std::vector<Reading>& readings, NodeId sender) {
  Encoder e;
  e.u32(static_cast<uint32_t>(readings.size()));
  for (const auto& r : readings) encode(e, r);
  encode(e, sender);
  return e.take();
}

void encode(Encoder& e, const DataPacket& v) {
  e.u32(static_cast<uint32_t>(v.readings.size()));
  for (const auto& r : v.readings) encode(e, r);
  encode(e, v.sender);
  encode(e, v.sender_signature);
  e.u32(static_cast<uint32_t>(v.endorsements.size()));
  for (const auto& en : v.endorsements) encode(e, en);
  e.u32(static_cast<uint32_t>(v.hop_trace.size()));
  for (const auto& n : v.hop_trace) encode(e, n);
}

DataPacket decode_data_packet(Decoder& d) {
  DataPacket v;
  uint32_t n = d.u32();
  v.readings.reserve(n);
  for (uint32_t i = 0; i < n; ++i) v.readings.push_back(decode_reading(d));
  v.sender = decode_node_id(d);
  v.sender_signature = decode_signature(d);
  uint32_t m = d.u32();
  v.endorsements.reserve(m);
  for (uint32_t i = 0; i < m; ++i) v.endorsements.push_back(decode_endorsement(d));
  uint32_t k = d.u32();
  v.hop_trace.reserve(k);
  for (uint32_t i = 0; i < k; ++i) v.hop_trace.push_back(decode_node_id(d));
  return v;
}

Reading generate_reading(NodeId node, const Vec2& pos, SimTime now, const EnvModel& env,
                         bool malicious, double falsification_offset, size_t payload_size,
                         Rng& rng) {
  Reading r;
  r.sensor = node;
  r.timestamp = now;
  r.payload.resize(std::max<size_t>(payload_size, 1));
  // deterministic filler; content is opaque to every consumer
  uint8_t b = static_cast<uint8_t>(node.index * 131 + (now & 0xff));
  for (auto& byte : r.payload) byte = b++;
  r.ground_truth_value = env.observe(pos, rng);
  if (malicious) {
    r.ground_truth_value += falsification_offset;
    r.secret_malicious_flag = true;
  }
  return r;
}

DataPacket make_packet(const Reading& reading, const KeyPair& sender_key) {
  DataPacket p;
  p.readings.push_back(reading);
  p.sender = reading.sensor;
  p.sender_signature = sign(packet_preimage(p.readings, p.sender), sender_key);
  return p;
}

double relative_deviation(double value, double reference) {
  double denom = std::max(std::abs(reference), 1e-9);
  return std::abs(value - reference) / denom;
}

EndorseOutcome validate_and_endorse(DataPacket& packet, const KeyPair& at_key,
                                    const Bytes& sender_public_key, double local_value,
                                    double tolerance) {
  if (packet.readings.empty()) throw Error("MalformedPacket", "packet carries no readings");
  Bytes preimage = packet_preimage(packet.readings, packet.sender);
  if (!verify(preimage, packet.sender_signature, sender_public_key)) {
    return EndorseOutcome::Reject;
  }
  packet.hop_trace.push_back(at_key.owner);
  double worst = 0.0;
  for (const auto& r : packet.readings) {
    worst = std::max(worst, relative_deviation(r.ground_truth_value, local_value));
  }
  if (worst > tolerance) return EndorseOutcome::ForwardUnendorsed;
  Endorsement en;
  en.endorser = at_key.owner;
  en.signature = sign(preimage, at_key);
  packet.endorsements.push_back(en);
  return EndorseOutcome::Endorsed;
}

bool fully_endorsed(const DataPacket& packet) {
  if (packet.hop_trace.empty()) return false;
  for (const auto& hop : packet.hop_trace) {
    bool found = false;
    for (const auto& en : packet.endorsements) {
      if (en.endorser == hop) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

namespace {

struct UnionFind {
  std::vector<size_t> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  size_t find(size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Deterministic k-means over one oversized component: farthest-point seeding
// from the lowest-index member, a few Lloyd rounds, ties to the lower cell.
std::vector<std::vector<size_t>> subdivide(const std::vector<size_t>& component,
                                           const std::vector<Vec2>& pos, size_t target) {
  size_t k = (component.size() + target - 1) / target;
  if (k <= 1) return {component};

  std::vector<Vec2> centers;
  centers.push_back(pos[component[0]]);
  while (centers.size() < k) {
    size_t best = component[0];
    double best_d = -1.0;
    for (size_t idx : component) {
      double d = std::numeric_limits<double>::max();
      for (const auto& c : centers) d = std::min(d, distance(pos[idx], c));
      if (d > best_d) {
        best_d = d;
        best = idx;
      }
    }
    centers.push_back(pos[best]);
  }

  std::vector<size_t> assign(component.size(), 0);
  for (int round = 0; round < 16; ++round) {
    bool moved = false;
    for (size_t i = 0; i < component.size(); ++i) {
      size_t best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (size_t c = 0; c < centers.size(); ++c) {
        double d = distance(pos[component[i]], centers[c]);
        if (d < best_d - 1e-12) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        moved = true;
      }
    }
    for (size_t c = 0; c < centers.size(); ++c) {
      Vec2 sum{};
      size_t count = 0;
      for (size_t i = 0; i < component.size(); ++i) {
        if (assign[i] == c) {
          sum.x += pos[component[i]].x;
          sum.y += pos[component[i]].y;
          ++count;
        }
      }
      if (count > 0) centers[c] = {sum.x / count, sum.y / count};
    }
    if (!moved) break;
  }

  std::vector<std::vector<size_t>> cells(centers.size());
  for (size_t i = 0; i < component.size(); ++i) cells[assign[i]].push_back(component[i]);
  std::erase_if(cells, [](const auto& c) { return c.empty(); });
  return cells;
}

}  // namespace

std::vector<Cluster> build_cluster_topology(
    const std::vector<std::pair<NodeId, Vec2>>& sensor_positions,
    const ClusteringOptions& opts, Rng& /*rng*/) {
  if (sensor_positions.empty()) throw Error("EmptyTopology", "no sensors to cluster");
  size_t n = sensor_positions.size();
  std::vector<Vec2> pos(n);
  for (size_t i = 0; i < n; ++i) pos[i] = sensor_positions[i].second;

  UnionFind uf(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (distance(pos[i], pos[j]) <= opts.link_radius_km) uf.unite(i, j);
    }
  }
  std::map<size_t, std::vector<size_t>> components;  // keyed by root = lowest index
  for (size_t i = 0; i < n; ++i) components[uf.find(i)].push_back(i);

  std::vector<std::vector<size_t>> cells;
  for (auto& [root, comp] : components) {
    for (auto& cell : subdivide(comp, pos, opts.target_cluster_size)) {
      cells.push_back(std::move(cell));
    }
  }

  std::vector<Cluster> out;
  out.reserve(cells.size());
  for (auto& cell : cells) {
    std::sort(cell.begin(), cell.end());
    Cluster c;
    c.id = static_cast<uint32_t>(out.size());

    Vec2 centroid{};
    for (size_t idx : cell) {
      centroid.x += pos[idx].x;
      centroid.y += pos[idx].y;
    }
    centroid.x /= static_cast<double>(cell.size());
    centroid.y /= static_cast<double>(cell.size());

    size_t head_idx = cell[0];
    double best = std::numeric_limits<double>::max();
    for (size_t idx : cell) {
      double d = distance(pos[idx], centroid);
      // ties break to the lowest NodeId index (cell is sorted)
      if (d < best - 1e-12) {
        best = d;
        head_idx = idx;
      }
    }
    c.head = sensor_positions[head_idx].first;

    // shortest hop paths member -> head over in-cluster links within range
    std::vector<int> hops(cell.size(), -1);
    std::vector<size_t> prev(cell.size(), SIZE_MAX);
    std::vector<size_t> order;
    size_t head_local = std::find(cell.begin(), cell.end(), head_idx) - cell.begin();
    hops[head_local] = 0;
    order.push_back(head_local);
    for (size_t q = 0; q < order.size(); ++q) {
      size_t u = order[q];
      for (size_t v = 0; v < cell.size(); ++v) {
        if (hops[v] >= 0) continue;
        if (distance(pos[cell[u]], pos[cell[v]]) <= opts.sensor_range_km) {
          hops[v] = hops[u] + 1;
          prev[v] = u;
          order.push_back(v);
        }
      }
    }

    for (size_t i = 0; i < cell.size(); ++i) {
      c.members.push_back(sensor_positions[cell[i]].first);
      if (hops[i] < 0) {
        throw Error("DisconnectedSensor",
                    to_string(sensor_positions[cell[i]].first) + " cannot reach its cluster head");
      }
      std::vector<NodeId> route;
      for (size_t at = prev[i]; at != SIZE_MAX; at = prev[at]) {
        route.push_back(sensor_positions[cell[at]].first);
      }
      c.intra_routes.push_back(std::move(route));
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace quico
