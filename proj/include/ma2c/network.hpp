#ifndef MA2C_NETWORK_HPP
#define MA2C_NETWORK_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace ma2c {

struct Lane {
  std::string id;
  double length = 0.0;      // m
  double free_speed = 0.0;  // m/s
  std::string from_node;
  std::string to_node;
  double sensor_zone = 50.0;  // m, wave measurement window upstream of the stop line
};

struct Phase {
  std::string id;
  std::vector<std::string> green_lanes;
};

/// A node of the road graph. Signalized ones (`is_agent`) are the learners.
struct Intersection {
  std::string id;
  std::vector<std::string> incoming_lanes;
  std::vector<Phase> phases;
  bool is_agent = true;
};

struct Route {
  std::string id;
  std::vector<std::string> lanes;
  double weight = 1.0;  // relative OD demand share
};

/// Immutable road network plus the index tables derived from it.
///
/// Build it with `finalize()` (or `load_network`), which checks every
/// invariant and fills the derived members. Agents are the intersections
/// flagged `is_agent`, numbered in file order; that agent index is the
/// identifier used by the simulator and the learners.
class NetworkSpec {
 public:
  std::vector<Lane> lanes;
  std::vector<Intersection> intersections;
  std::vector<Route> routes;
  int neighbor_threshold = 1;

  /// Validates and builds the derived tables. Throws ValidationError.
  void finalize();

  std::size_t lane_index(const std::string& id) const;
  std::size_t num_agents() const { return agent_nodes_.size(); }
  const Intersection& agent(std::size_t a) const { return intersections[agent_nodes_[a]]; }
  const std::string& agent_id(std::size_t a) const { return agent(a).id; }

  /// Lane indices of L_a in the order of `incoming_lanes`.
  const std::vector<std::size_t>& agent_lanes(std::size_t a) const { return agent_lanes_[a]; }
  /// Per phase, green flag per entry of `agent_lanes(a)`.
  const std::vector<std::vector<bool>>& phase_masks(std::size_t a) const { return phase_masks_[a]; }
  std::size_t num_phases(std::size_t a) const { return phase_masks_[a].size(); }
  std::size_t phase_index(std::size_t a, const std::string& phase_id) const;
  std::size_t agent_index(const std::string& id) const;

  /// Agent controlling the stop line at the end of lane `l`, or npos when the
  /// lane ends at an unsignalized node.
  std::size_t controlling_agent(std::size_t l) const { return lane_agent_[l]; }
  /// Position of lane `l` in its controlling agent's incoming list.
  std::size_t slot_in_agent(std::size_t l) const { return lane_slot_[l]; }

  const std::vector<std::size_t>& route_lanes(std::size_t r) const { return route_lanes_[r]; }

  /// Agent-to-agent adjacency: a, b adjacent iff a lane directly joins their nodes.
  const std::vector<std::vector<std::size_t>>& agent_adjacency() const { return adjacency_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::unordered_map<std::string, std::size_t> lane_lookup_;
  std::vector<std::size_t> agent_nodes_;
  std::vector<std::vector<std::size_t>> agent_lanes_;
  std::vector<std::vector<std::vector<bool>>> phase_masks_;
  std::vector<std::size_t> lane_agent_;
  std::vector<std::size_t> lane_slot_;
  std::vector<std::vector<std::size_t>> route_lanes_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

using NeighborGraph = std::vector<std::vector<std::size_t>>;

/// Parses the network document (`format: 1`). Throws ParseError or ValidationError.
NetworkSpec parse_network(const std::string& text);
NetworkSpec load_network(const std::filesystem::path& path);
std::string network_to_json(const NetworkSpec& spec);

/// Hop distances between agents on the agent graph; unreachable pairs get -1.
std::vector<std::vector<int>> agent_distances(const NetworkSpec& spec);

/// N_a = { b != a : d(a, b) <= threshold }, each list sorted ascending.
NeighborGraph neighbor_graph(const NetworkSpec& spec);
NeighborGraph neighbor_graph(const NetworkSpec& spec, int threshold);

}  // namespace ma2c

#endif  // MA2C_NETWORK_HPP
