#include <doctest.h>

#include "quico/wsn.hpp"

using namespace quico;

namespace {

Seed seed_of(uint8_t b) {
  Seed s;
  s.fill(b);
  return s;
}

EnvModel flat_env(double value, double noise = 0.0) {
  EnvModel env;
  env.base_value = value;
  env.noise_amplitude = noise;
  return env;
}

}  // namespace

TEST_CASE("honest reading stays in the noise band; zero noise is exact") {
  EnvModel env = flat_env(20.0, 0.5);
  Rng rng(31);
  for (int i = 0; i < 10000; ++i) {
    Reading r = generate_reading({Role::Sensor, 1}, {0.1, 0.1}, 1000, env, false, 75.0, 16, rng);
    CHECK(r.ground_truth_value >= 19.5);
    CHECK(r.ground_truth_value <= 20.5);
    CHECK_FALSE(r.secret_malicious_flag);
  }
  EnvModel exact = flat_env(20.0, 0.0);
  Reading r = generate_reading({Role::Sensor, 2}, {0.2, 0.2}, 1000, exact, false, 75.0, 16, rng);
  CHECK(r.ground_truth_value == 20.0);
}

TEST_CASE("malicious reading applies the falsification offset and secret flag") {
  EnvModel env = flat_env(20.0, 0.0);
  Rng rng(32);
  Reading r = generate_reading({Role::Sensor, 3}, {0.3, 0.3}, 2000, env, true, 75.0, 16, rng);
  CHECK(r.ground_truth_value == 95.0);
  CHECK(r.secret_malicious_flag);
}

TEST_CASE("validate_and_endorse: endorse, forward-unendorsed, reject") {
  Seed scenario = seed_of(4);
  KeyPair sender = keygen(scenario, {Role::Sensor, 10});
  KeyPair relay = keygen(scenario, {Role::Sensor, 11});
  EnvModel env = flat_env(20.0, 0.0);
  Rng rng(33);

  SUBCASE("consistent data is endorsed") {
    Reading r = generate_reading(sender.owner, {0, 0}, 100, env, false, 75.0, 8, rng);
    r.ground_truth_value = 20.1;
    DataPacket p = make_packet(r, sender);
    p.sender_signature = sign(packet_preimage(p.readings, p.sender), sender);
    auto out = validate_and_endorse(p, relay, sender.public_key, 20.0, 0.5);
    CHECK(out == EndorseOutcome::Endorsed);
    REQUIRE(p.endorsements.size() == 1);
    CHECK(p.endorsements[0].endorser == relay.owner);
    CHECK(p.hop_trace.back() == relay.owner);
    CHECK(fully_endorsed(p));
  }

  SUBCASE("deviating data is forwarded without endorsement") {
    Reading r = generate_reading(sender.owner, {0, 0}, 100, env, true, 75.0, 8, rng);
    DataPacket p = make_packet(r, sender);
    auto out = validate_and_endorse(p, relay, sender.public_key, 20.0, 0.5);
    CHECK(out == EndorseOutcome::ForwardUnendorsed);
    CHECK(p.endorsements.empty());
    CHECK(p.hop_trace.back() == relay.owner);
    CHECK_FALSE(fully_endorsed(p));
  }

  SUBCASE("corrupted signature is rejected") {
    Reading r = generate_reading(sender.owner, {0, 0}, 100, env, false, 75.0, 8, rng);
    DataPacket p = make_packet(r, sender);
    p.sender_signature.bytes[0] ^= 0xff;
    auto out = validate_and_endorse(p, relay, sender.public_key, 20.0, 0.5);
    CHECK(out == EndorseOutcome::Reject);
  }

  SUBCASE("empty packet is malformed") {
    DataPacket p;
    p.sender = sender.owner;
    CHECK_THROWS_WITH_AS(validate_and_endorse(p, relay, sender.public_key, 20.0, 0.5),
                         doctest::Contains("MalformedPacket"), Error);
  }
}

TEST_CASE("endorsements only grow along a route and match the hop trace") {
  Seed scenario = seed_of(5);
  KeyPair sender = keygen(scenario, {Role::Sensor, 20});
  std::vector<KeyPair> relays;
  for (uint32_t i = 21; i < 25; ++i) relays.push_back(keygen(scenario, {Role::Sensor, i}));
  EnvModel env = flat_env(20.0, 0.2);
  Rng rng(34);

  Reading r = generate_reading(sender.owner, {0, 0}, 100, env, false, 75.0, 8, rng);
  DataPacket p = make_packet(r, sender);
  size_t prev = 0;
  for (auto& relay : relays) {
    auto out = validate_and_endorse(p, relay, sender.public_key, 20.0, 0.5);
    CHECK(out == EndorseOutcome::Endorsed);
    CHECK(p.endorsements.size() == prev + 1);
    prev = p.endorsements.size();
  }
  // every endorser appears in the hop trace
  for (const auto& en : p.endorsements) {
    CHECK(std::find(p.hop_trace.begin(), p.hop_trace.end(), en.endorser) != p.hop_trace.end());
  }
  CHECK(fully_endorsed(p));
}

TEST_CASE("a malicious reading relayed through an honest hop loses an endorsement") {
  Seed scenario = seed_of(6);
  KeyPair sender = keygen(scenario, {Role::Sensor, 30});
  KeyPair honest = keygen(scenario, {Role::Sensor, 31});
  KeyPair colluding = keygen(scenario, {Role::Sensor, 32});
  EnvModel env = flat_env(20.0, 0.0);
  Rng rng(35);

  Reading bad = generate_reading(sender.owner, {0, 0}, 100, env, true, 75.0, 8, rng);
  DataPacket p = make_packet(bad, sender);
  // a colluding relay whose own reading is also falsified endorses it
  validate_and_endorse(p, colluding, sender.public_key, 95.0, 0.5);
  CHECK(fully_endorsed(p));
  // the honest hop's contemporaneous reading exposes it
  validate_and_endorse(p, honest, sender.public_key, 20.0, 0.5);
  CHECK_FALSE(fully_endorsed(p));
}

TEST_CASE("cluster topology base cases") {
  Rng rng(36);
  ClusteringOptions opts;
  opts.link_radius_km = 0.06;
  opts.sensor_range_km = 0.1;
  opts.target_cluster_size = 25;

  SUBCASE("single sensor forms a singleton cluster") {
    auto clusters = build_cluster_topology({{{Role::Sensor, 0}, {0.1, 0.1}}}, opts, rng);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].head == NodeId{Role::Sensor, 0});
    CHECK(clusters[0].members.size() == 1);
    CHECK(clusters[0].route_of({Role::Sensor, 0}).empty());
  }

  SUBCASE("square corners within radius form one cluster, centroid-nearest head") {
    std::vector<std::pair<NodeId, Vec2>> sensors = {
        {{Role::Sensor, 0}, {0.00, 0.00}},
        {{Role::Sensor, 1}, {0.04, 0.00}},
        {{Role::Sensor, 2}, {0.00, 0.04}},
        {{Role::Sensor, 3}, {0.04, 0.04}},
    };
    auto clusters = build_cluster_topology(sensors, opts, rng);
    REQUIRE(clusters.size() == 1);
    // brute force: all corners are equidistant from the centroid, so the tie
    // breaks to the lowest index
    CHECK(clusters[0].head == NodeId{Role::Sensor, 0});
  }

  SUBCASE("groups separated far beyond the radius split") {
    std::vector<std::pair<NodeId, Vec2>> sensors = {
        {{Role::Sensor, 0}, {0.00, 0.00}},
        {{Role::Sensor, 1}, {0.02, 0.00}},
        {{Role::Sensor, 2}, {2.00, 2.00}},
        {{Role::Sensor, 3}, {2.02, 2.00}},
    };
    auto clusters = build_cluster_topology(sensors, opts, rng);
    CHECK(clusters.size() == 2);
  }

  SUBCASE("unreachable member raises DisconnectedSensor") {
    // linked at the grouping radius but beyond the transmission range
    ClusteringOptions tight = opts;
    tight.link_radius_km = 0.5;
    tight.sensor_range_km = 0.05;
    std::vector<std::pair<NodeId, Vec2>> sensors = {
        {{Role::Sensor, 0}, {0.00, 0.00}},
        {{Role::Sensor, 1}, {0.40, 0.00}},
    };
    CHECK_THROWS_WITH_AS(build_cluster_topology(sensors, tight, rng),
                         doctest::Contains("DisconnectedSensor"), Error);
  }
}

TEST_CASE("large fields are subdivided with hop routes to each head") {
  Rng rng(37);
  std::vector<std::pair<NodeId, Vec2>> sensors;
  uint32_t idx = 0;
  for (int gx = 0; gx < 10; ++gx) {
    for (int gy = 0; gy < 10; ++gy) {
      sensors.push_back({{Role::Sensor, idx++}, {gx * 0.022, gy * 0.022}});
    }
  }
  ClusteringOptions opts;
  auto clusters = build_cluster_topology(sensors, opts, rng);
  CHECK(clusters.size() >= 3);
  size_t total = 0;
  for (const auto& c : clusters) {
    total += c.members.size();
    for (size_t i = 0; i < c.members.size(); ++i) {
      const auto& route = c.intra_routes[i];
      if (c.members[i] == c.head) {
        CHECK(route.empty());
      } else {
        REQUIRE(!route.empty());
        CHECK(route.back() == c.head);
      }
    }
  }
  CHECK(total == sensors.size());  // every sensor in exactly one cluster
}
