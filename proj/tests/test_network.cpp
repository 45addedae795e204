#include <algorithm>
#include <queue>
#include <random>
#include <set>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "ma2c/error.hpp"
#include "ma2c/network.hpp"
#include "test_util.hpp"

namespace {

using ma2c::NetworkSpec;
using nlohmann::json;

json two_agent_doc() {
  return json::parse(R"({
    "format": 1,
    "lanes": [
      {"id": "in_a", "length": 100, "free_speed": 10, "from_node": "W", "to_node": "A"},
      {"id": "side_a", "length": 100, "free_speed": 10, "from_node": "N", "to_node": "A"},
      {"id": "a_b", "length": 100, "free_speed": 10, "from_node": "A", "to_node": "B"},
      {"id": "side_b", "length": 100, "free_speed": 10, "from_node": "S", "to_node": "B"},
      {"id": "out", "length": 100, "free_speed": 10, "from_node": "B", "to_node": "E"}
    ],
    "intersections": [
      {"id": "A", "incoming_lanes": ["in_a", "side_a"],
       "phases": [{"id": "p0", "green_lanes": ["in_a"]}, {"id": "p1", "green_lanes": ["side_a"]}]},
      {"id": "B", "incoming_lanes": ["a_b", "side_b"],
       "phases": [{"id": "p0", "green_lanes": ["a_b"]}, {"id": "p1", "green_lanes": ["side_b"]}]}
    ],
    "routes": [["in_a", "a_b", "out"], {"id": "side", "lanes": ["side_b", "out"], "weight": 2}]
  })");
}

std::string error_of(const json& doc) {
  try {
    ma2c::parse_network(doc.dump());
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

// Breadth-first search over an explicit edge list.
std::vector<int> bfs(const std::vector<std::set<std::size_t>>& adj, std::size_t source) {
  std::vector<int> d(adj.size(), -1);
  std::queue<std::size_t> q;
  d[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (auto v : adj[u])
      if (d[v] < 0) {
        d[v] = d[u] + 1;
        q.push(v);
      }
  }
  return d;
}

TEST(LoadNetwork, GridFixtureHasFourAgentsAndTwelveLanes) {
  const NetworkSpec spec = ma2c::load_network(ma2c::test::data_file("grid2x2.json"));
  EXPECT_EQ(spec.num_agents(), 4u);
  EXPECT_EQ(spec.lanes.size(), 12u);
  for (std::size_t a = 0; a < 4; ++a) EXPECT_EQ(spec.num_phases(a), 2u);
}

TEST(LoadNetwork, OtherFixturesLoad) {
  EXPECT_EQ(ma2c::load_network(ma2c::test::data_file("grid3x3.json")).num_agents(), 9u);
  EXPECT_EQ(ma2c::load_network(ma2c::test::data_file("irregular7.json")).num_agents(), 7u);
}

TEST(LoadNetwork, AcceptsPlainAndWeightedRoutes) {
  const NetworkSpec spec = ma2c::parse_network(two_agent_doc().dump());
  ASSERT_EQ(spec.routes.size(), 2u);
  EXPECT_EQ(spec.routes[0].weight, 1.0);
  EXPECT_EQ(spec.routes[1].id, "side");
  EXPECT_EQ(spec.routes[1].weight, 2.0);
  EXPECT_EQ(spec.route_lanes(0), (std::vector<std::size_t>{0, 2, 4}));
}

TEST(LoadNetwork, BrokenRouteNamesTheRoute) {
  json doc = two_agent_doc();
  doc["routes"][1]["lanes"] = {"side_a", "out"};
  const std::string msg = error_of(doc);
  EXPECT_NE(msg.find("side"), std::string::npos) << msg;
  EXPECT_NE(msg.find("does not connect"), std::string::npos) << msg;
  EXPECT_THROW(ma2c::parse_network(doc.dump()), ma2c::ValidationError);
}

TEST(LoadNetwork, UncoveredLaneIsRejected) {
  json doc = two_agent_doc();
  doc["intersections"][0]["phases"][1]["green_lanes"] = {"in_a"};
  const std::string msg = error_of(doc);
  EXPECT_NE(msg.find("side_a"), std::string::npos) << msg;
  EXPECT_THROW(ma2c::parse_network(doc.dump()), ma2c::ValidationError);
}

TEST(LoadNetwork, LaneInvariantsAreEnforced) {
  json doc = two_agent_doc();
  doc["lanes"][0]["length"] = 0;
  EXPECT_THROW(ma2c::parse_network(doc.dump()), ma2c::ValidationError);
  doc = two_agent_doc();
  doc["lanes"][0]["free_speed"] = -1;
  EXPECT_THROW(ma2c::parse_network(doc.dump()), ma2c::ValidationError);
  doc = two_agent_doc();
  doc["lanes"][0]["sensor_zone"] = 150;
  EXPECT_NE(error_of(doc).find("in_a"), std::string::npos);
}

TEST(LoadNetwork, PhaseRulesAreEnforced) {
  json doc = two_agent_doc();
  doc["intersections"][0]["phases"] = {doc["intersections"][0]["phases"][0]};
  EXPECT_NE(error_of(doc).find("at least 2 phases"), std::string::npos);
  doc = two_agent_doc();
  doc["intersections"][0]["phases"][0]["green_lanes"] = {"in_a", "a_b"};
  EXPECT_THROW(ma2c::parse_network(doc.dump()), ma2c::ValidationError);
  doc = two_agent_doc();
  doc["intersections"][0]["phases"][0]["green_lanes"] = json::array();
  EXPECT_THROW(ma2c::parse_network(doc.dump()), ma2c::ValidationError);
}

TEST(LoadNetwork, DisconnectedAgentsAreRejected) {
  json doc = two_agent_doc();
  doc["lanes"][2]["to_node"] = "Z";
  doc["lanes"][4]["from_node"] = "Z";
  doc["intersections"][1]["incoming_lanes"] = {"side_b"};
  doc["intersections"][1]["phases"] = json::array({{{"id", "p0"}, {"green_lanes", {"side_b"}}},
                                                  {{"id", "p1"}, {"green_lanes", {"side_b"}}}});
  doc["routes"] = json::array({json::array({"in_a", "a_b", "out"})});
  EXPECT_NE(error_of(doc).find("disconnected"), std::string::npos) << error_of(doc);
}

TEST(LoadNetwork, ParseErrors) {
  EXPECT_THROW(ma2c::parse_network("{not json"), ma2c::ParseError);
  EXPECT_THROW(ma2c::parse_network("[]"), ma2c::ParseError);
  json doc = two_agent_doc();
  doc["format"] = 2;
  EXPECT_THROW(ma2c::parse_network(doc.dump()), ma2c::ParseError);
  doc = two_agent_doc();
  doc.erase("lanes");
  EXPECT_THROW(ma2c::parse_network(doc.dump()), ma2c::ParseError);
  EXPECT_THROW(ma2c::load_network("/nonexistent/net.json"), ma2c::ParseError);
}

TEST(LoadNetwork, JsonRoundTrip) {
  const NetworkSpec a = ma2c::load_network(ma2c::test::data_file("irregular7.json"));
  const NetworkSpec b = ma2c::parse_network(ma2c::network_to_json(a));
  EXPECT_EQ(ma2c::network_to_json(a), ma2c::network_to_json(b));
  EXPECT_EQ(b.num_agents(), a.num_agents());
}

TEST(NeighborGraph, GridAgentsHaveTwoNeighbors) {
  const NetworkSpec spec = ma2c::load_network(ma2c::test::data_file("grid2x2.json"));
  const auto n = ma2c::neighbor_graph(spec);
  ASSERT_EQ(n.size(), 4u);
  // J00 touches J01 and J10; J11 touches J01 and J10.
  for (const auto& list : n) EXPECT_EQ(list.size(), 2u);
  EXPECT_EQ(n[spec.agent_index("J00")],
            (std::vector<std::size_t>{spec.agent_index("J01"), spec.agent_index("J10")}));
}

TEST(NeighborGraph, SingleAgentHasNoNeighbors) {
  json doc = two_agent_doc();
  doc["intersections"][1]["is_agent"] = false;
  doc["lanes"].erase(3);
  doc["intersections"][1]["incoming_lanes"] = {"a_b"};
  doc["intersections"][1]["phases"] = json::array();
  doc["routes"] = json::array({json::array({"in_a", "a_b", "out"})});
  const NetworkSpec spec = ma2c::parse_network(doc.dump());
  ASSERT_EQ(spec.num_agents(), 1u);
  EXPECT_TRUE(ma2c::neighbor_graph(spec)[0].empty());
}

TEST(NeighborGraph, DiameterThresholdGivesEveryone) {
  const NetworkSpec spec = ma2c::load_network(ma2c::test::data_file("irregular7.json"));
  const auto d = ma2c::agent_distances(spec);
  int diameter = 0;
  for (const auto& row : d) diameter = std::max(diameter, *std::max_element(row.begin(), row.end()));
  const auto n = ma2c::neighbor_graph(spec, diameter);
  for (std::size_t a = 0; a < n.size(); ++a) EXPECT_EQ(n[a].size(), spec.num_agents() - 1);
  const auto closer = ma2c::neighbor_graph(spec, diameter - 1);
  EXPECT_TRUE(std::any_of(closer.begin(), closer.end(),
                          [&](const auto& list) { return list.size() < spec.num_agents() - 1; }));
}

// Random connected agent graphs built as one lane per directed edge, then
// checked against a BFS written over the edge list used to build them.
TEST(NeighborGraph, MatchesBfsOracleOnRandomGraphs) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
    std::vector<std::set<std::size_t>> adj(n);
    for (std::size_t v = 1; v < n; ++v) {
      const std::size_t u = std::uniform_int_distribution<std::size_t>(0, v - 1)(rng);
      adj[u].insert(v);
      adj[v].insert(u);
    }
    const std::size_t extra = std::uniform_int_distribution<std::size_t>(0, n)(rng);
    for (std::size_t k = 0; k < extra && n > 1; ++k) {
      const auto u = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      const auto v = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      if (u != v) {
        adj[u].insert(v);
        adj[v].insert(u);
      }
    }
    const NetworkSpec spec = ma2c::test::graph_network(adj);
    const int threshold = std::uniform_int_distribution<int>(0, 4)(rng);
    const auto got = ma2c::neighbor_graph(spec, threshold);
    for (std::size_t i = 0; i < n; ++i) {
      const auto d = bfs(adj, i);
      std::vector<std::size_t> want;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && d[j] >= 0 && d[j] <= threshold) want.push_back(j);
      ASSERT_EQ(got[i], want) << "trial " << trial << " agent " << i;
      for (std::size_t j : got[i]) {
        const auto& back = got[j];
        EXPECT_TRUE(std::binary_search(back.begin(), back.end(), i)) << "asymmetric pair " << i << "," << j;
      }
      // The neighborhood including the agent itself has |N_i| + 1 members.
      std::set<std::size_t> closed(got[i].begin(), got[i].end());
      closed.insert(i);
      EXPECT_EQ(closed.size(), got[i].size() + 1);
    }
  }
}

}  // namespace
