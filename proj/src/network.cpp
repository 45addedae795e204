#include "ma2c/network.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ma2c/error.hpp"

namespace ma2c {

using nlohmann::json;

namespace {

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
T optional(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return require<T>(j, key, where);
}

}  // namespace

std::size_t NetworkSpec::lane_index(const std::string& id) const {
  auto it = lane_lookup_.find(id);
  if (it == lane_lookup_.end()) throw InvalidArgument("unknown lane '" + id + "'");
  return it->second;
}

std::size_t NetworkSpec::agent_index(const std::string& id) const {
  for (std::size_t a = 0; a < agent_nodes_.size(); ++a)
    if (agent(a).id == id) return a;
  throw InvalidArgument("unknown agent '" + id + "'");
}

std::size_t NetworkSpec::phase_index(std::size_t a, const std::string& phase_id) const {
  const auto& phases = agent(a).phases;
  for (std::size_t p = 0; p < phases.size(); ++p)
    if (phases[p].id == phase_id) return p;
  throw InvalidArgument("agent '" + agent(a).id + "' has no phase '" + phase_id + "'");
}

void NetworkSpec::finalize() {
  if (neighbor_threshold < 0) throw ValidationError("neighbor_threshold must be >= 0");

  lane_lookup_.clear();
  for (std::size_t l = 0; l < lanes.size(); ++l) {
    const Lane& lane = lanes[l];
    if (lane.id.empty()) throw ValidationError("lane #" + std::to_string(l) + " has an empty id");
    if (!lane_lookup_.emplace(lane.id, l).second)
      throw ValidationError("duplicate lane id '" + lane.id + "'");
    if (!(lane.length > 0.0)) throw ValidationError("lane '" + lane.id + "': length must be > 0");
    if (!(lane.free_speed > 0.0))
      throw ValidationError("lane '" + lane.id + "': free_speed must be > 0");
    if (!(lane.sensor_zone > 0.0 && lane.sensor_zone <= lane.length))
      throw ValidationError("lane '" + lane.id + "': sensor_zone must lie in (0, length]");
  }

  std::unordered_map<std::string, std::size_t> node_lookup;
  for (std::size_t n = 0; n < intersections.size(); ++n)
    if (!node_lookup.emplace(intersections[n].id, n).second)
      throw ValidationError("duplicate intersection id '" + intersections[n].id + "'");

  agent_nodes_.clear();
  agent_lanes_.clear();
  phase_masks_.clear();
  lane_agent_.assign(lanes.size(), npos);
  lane_slot_.assign(lanes.size(), npos);

  for (std::size_t n = 0; n < intersections.size(); ++n) {
    const Intersection& node = intersections[n];
    std::vector<std::size_t> incoming;
    std::set<std::string> seen;
    for (const auto& lane_id : node.incoming_lanes) {
      auto it = lane_lookup_.find(lane_id);
      if (it == lane_lookup_.end())
        throw ValidationError("intersection '" + node.id + "': unknown incoming lane '" + lane_id + "'");
      if (!seen.insert(lane_id).second)
        throw ValidationError("intersection '" + node.id + "': lane '" + lane_id + "' listed twice");
      if (lanes[it->second].to_node != node.id)
        throw ValidationError("intersection '" + node.id + "': incoming lane '" + lane_id +
                              "' ends at node '" + lanes[it->second].to_node + "'");
      incoming.push_back(it->second);
    }
    if (!node.is_agent) continue;

    if (node.phases.size() < 2)
      throw ValidationError("agent '" + node.id + "' needs at least 2 phases");
    std::vector<std::vector<bool>> masks;
    std::vector<bool> covered(incoming.size(), false);
    std::set<std::string> phase_ids;
    for (const Phase& phase : node.phases) {
      if (!phase_ids.insert(phase.id).second)
        throw ValidationError("agent '" + node.id + "': duplicate phase id '" + phase.id + "'");
      if (phase.green_lanes.empty())
        throw ValidationError("agent '" + node.id + "', phase '" + phase.id + "': no green lanes");
      std::vector<bool> mask(incoming.size(), false);
      for (const auto& lane_id : phase.green_lanes) {
        auto pos = std::find(node.incoming_lanes.begin(), node.incoming_lanes.end(), lane_id);
        if (pos == node.incoming_lanes.end())
          throw ValidationError("agent '" + node.id + "', phase '" + phase.id + "': lane '" + lane_id +
                                "' is not an incoming lane");
        const auto slot = static_cast<std::size_t>(pos - node.incoming_lanes.begin());
        mask[slot] = true;
        covered[slot] = true;
      }
      masks.push_back(std::move(mask));
    }
    for (std::size_t s = 0; s < incoming.size(); ++s)
      if (!covered[s])
        throw ValidationError("agent '" + node.id + "': lane '" + node.incoming_lanes[s] +
                              "' receives green in no phase");

    const std::size_t a = agent_nodes_.size();
    for (std::size_t s = 0; s < incoming.size(); ++s) {
      lane_agent_[incoming[s]] = a;
      lane_slot_[incoming[s]] = s;
    }
    agent_nodes_.push_back(n);
    agent_lanes_.push_back(std::move(incoming));
    phase_masks_.push_back(std::move(masks));
  }

  // A lane that stops at a signal must be one of that signal's approaches.
  for (std::size_t l = 0; l < lanes.size(); ++l) {
    auto it = node_lookup.find(lanes[l].to_node);
    if (it != node_lookup.end() && intersections[it->second].is_agent && lane_agent_[l] == npos)
      throw ValidationError("lane '" + lanes[l].id + "' ends at agent '" + lanes[l].to_node +
                            "' but is not among its incoming lanes");
  }

  route_lanes_.clear();
  for (std::size_t r = 0; r < routes.size(); ++r) {
    const Route& route = routes[r];
    const std::string name = route.id.empty() ? "route #" + std::to_string(r) : "route '" + route.id + "'";
    if (route.lanes.empty()) throw ValidationError(name + " is empty");
    if (!(route.weight > 0.0)) throw ValidationError(name + ": weight must be > 0");
    std::vector<std::size_t> idx;
    for (const auto& lane_id : route.lanes) {
      auto it = lane_lookup_.find(lane_id);
      if (it == lane_lookup_.end()) throw ValidationError(name + ": unknown lane '" + lane_id + "'");
      if (!idx.empty() && lanes[idx.back()].to_node != lanes[it->second].from_node)
        throw ValidationError(name + ": lane '" + lanes[idx.back()].id + "' does not connect to lane '" +
                              lane_id + "'");
      idx.push_back(it->second);
    }
    route_lanes_.push_back(std::move(idx));
  }

  std::unordered_map<std::string, std::size_t> agent_of_node;
  for (std::size_t a = 0; a < agent_nodes_.size(); ++a) agent_of_node.emplace(agent(a).id, a);
  adjacency_.assign(agent_nodes_.size(), {});
  for (const Lane& lane : lanes) {
    auto from = agent_of_node.find(lane.from_node);
    auto to = agent_of_node.find(lane.to_node);
    if (from == agent_of_node.end() || to == agent_of_node.end() || from->second == to->second) continue;
    adjacency_[from->second].push_back(to->second);
    adjacency_[to->second].push_back(from->second);
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }

  const auto dist = agent_distances(*this);
  for (std::size_t a = 0; a < dist.size(); ++a)
    if (dist[0][a] < 0) throw ValidationError("agent graph is disconnected: '" + agent(a).id + "' is unreachable");
}

std::vector<std::vector<int>> agent_distances(const NetworkSpec& spec) {
  const auto& adj = spec.agent_adjacency();
  const std::size_t n = adj.size();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (std::size_t src = 0; src < n; ++src) {
    std::queue<std::size_t> frontier;
    dist[src][src] = 0;
    frontier.push(src);
    while (!frontier.empty()) {
      const std::size_t u = frontier.front();
      frontier.pop();
      for (std::size_t v : adj[u]) {
        if (dist[src][v] >= 0) continue;
        dist[src][v] = dist[src][u] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

NeighborGraph neighbor_graph(const NetworkSpec& spec, int threshold) {
  const auto dist = agent_distances(spec);
  NeighborGraph graph(dist.size());
  for (std::size_t a = 0; a < dist.size(); ++a)
    for (std::size_t b = 0; b < dist.size(); ++b)
      if (a != b && dist[a][b] >= 0 && dist[a][b] <= threshold) graph[a].push_back(b);
  return graph;
}

NeighborGraph neighbor_graph(const NetworkSpec& spec) { return neighbor_graph(spec, spec.neighbor_threshold); }

NetworkSpec parse_network(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("network: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("network: top level must be an object");
  const int format = require<int>(doc, "format", "network");
  if (format != 1) throw ParseError("network: unsupported format " + std::to_string(format));

  NetworkSpec spec;
  spec.neighbor_threshold = optional<int>(doc, "neighbor_threshold", 1, "network");

  for (const auto& jl : require<json>(doc, "lanes", "network")) {
    const std::string where = "lane " + jl.value("id", std::string("?"));
    Lane lane;
    lane.id = require<std::string>(jl, "id", where);
    lane.length = require<double>(jl, "length", where);
    lane.free_speed = require<double>(jl, "free_speed", where);
    lane.from_node = require<std::string>(jl, "from_node", where);
    lane.to_node = require<std::string>(jl, "to_node", where);
    lane.sensor_zone = optional<double>(jl, "sensor_zone", 50.0, where);
    spec.lanes.push_back(std::move(lane));
  }

  for (const auto& ji : require<json>(doc, "intersections", "network")) {
    const std::string where = "intersection " + ji.value("id", std::string("?"));
    Intersection node;
    node.id = require<std::string>(ji, "id", where);
    node.incoming_lanes = require<std::vector<std::string>>(ji, "incoming_lanes", where);
    node.is_agent = optional<bool>(ji, "is_agent", true, where);
    for (const auto& jp : optional<json>(ji, "phases", json::array(), where)) {
      Phase phase;
      phase.id = require<std::string>(jp, "id", where);
      phase.green_lanes = require<std::vector<std::string>>(jp, "green_lanes", where);
      node.phases.push_back(std::move(phase));
    }
    spec.intersections.push_back(std::move(node));
  }

  std::size_t r = 0;
  for (const auto& jr : require<json>(doc, "routes", "network")) {
    Route route;
    if (jr.is_array()) {
      route.lanes = jr.get<std::vector<std::string>>();
    } else {
      const std::string where = "route #" + std::to_string(r);
      route.id = optional<std::string>(jr, "id", "", where);
      route.lanes = require<std::vector<std::string>>(jr, "lanes", where);
      route.weight = optional<double>(jr, "weight", 1.0, where);
    }
    spec.routes.push_back(std::move(route));
    ++r;
  }

  spec.finalize();
  return spec;
}

NetworkSpec load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_network(buffer.str());
}

std::string network_to_json(const NetworkSpec& spec) {
  json doc;
  doc["format"] = 1;
  doc["neighbor_threshold"] = spec.neighbor_threshold;
  doc["lanes"] = json::array();
  for (const Lane& lane : spec.lanes)
    doc["lanes"].push_back({{"id", lane.id},
                            {"length", lane.length},
                            {"free_speed", lane.free_speed},
                            {"from_node", lane.from_node},
                            {"to_node", lane.to_node},
                            {"sensor_zone", lane.sensor_zone}});
  doc["intersections"] = json::array();
  for (const Intersection& node : spec.intersections) {
    json phases = json::array();
    for (const Phase& p : node.phases) phases.push_back({{"id", p.id}, {"green_lanes", p.green_lanes}});
    doc["intersections"].push_back(
        {{"id", node.id}, {"incoming_lanes", node.incoming_lanes}, {"phases", phases}, {"is_agent", node.is_agent}});
  }
  doc["routes"] = json::array();
  for (const Route& route : spec.routes)
    doc["routes"].push_back({{"id", route.id}, {"lanes", route.lanes}, {"weight", route.weight}});
  return doc.dump(2);
}

}  // namespace ma2c
