#ifndef MA2C_TESTS_TEST_UTIL_HPP
#define MA2C_TESTS_TEST_UTIL_HPP

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "ma2c/network.hpp"

namespace ma2c::test {

inline std::filesystem::path data_file(const std::string& name) {
  return std::filesystem::path(MA2C_DATA_DIR) / name;
}

/// One agent per vertex of `adj`; every directed edge u->v becomes a lane
/// "u_v", and each agent gets two boundary entry lanes so it always has two
/// phases. Phase 0 greens the first half of the incoming lanes.
inline NetworkSpec graph_network(const std::vector<std::set<std::size_t>>& adj, double length = 100.0) {
  NetworkSpec spec;
  auto node = [](std::size_t v) { return "G" + std::to_string(v); };
  std::vector<std::vector<std::string>> incoming(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v)
    for (const char* side : {"a", "b"}) {
      const std::string id = "X" + std::to_string(v) + side;
      spec.lanes.push_back({id, length, 10.0, id, node(v)});
      incoming[v].push_back(id);
    }
  for (std::size_t u = 0; u < adj.size(); ++u)
    for (std::size_t v : adj[u]) {
      const std::string id = std::to_string(u) + "_" + std::to_string(v);
      spec.lanes.push_back({id, length, 10.0, node(u), node(v)});
      incoming[v].push_back(id);
    }
  for (std::size_t v = 0; v < adj.size(); ++v) {
    Intersection in;
    in.id = node(v);
    in.incoming_lanes = incoming[v];
    const std::size_t half = incoming[v].size() / 2;
    in.phases.push_back({"p0", {incoming[v].begin(), incoming[v].begin() + static_cast<long>(half)}});
    in.phases.push_back({"p1", {incoming[v].begin() + static_cast<long>(half), incoming[v].end()}});
    spec.intersections.push_back(in);
  }
  spec.finalize();
  return spec;
}

}  // namespace ma2c::test

#endif  // MA2C_TESTS_TEST_UTIL_HPP
