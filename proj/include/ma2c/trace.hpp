#ifndef MA2C_TRACE_HPP
#define MA2C_TRACE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ma2c/emission.hpp"
#include "ma2c/microsim.hpp"

namespace ma2c {

/// Per-second record of one episode. Row k describes the state after the
/// tick ending at `times[k]`; emission columns are cumulative.
struct EpisodeTrace {
  std::vector<std::string> agent_ids;
  std::vector<std::string> lane_ids;
  std::vector<double> lane_lengths;  // m

  std::vector<double> times;
  std::vector<long> running;
  std::vector<long> inserted;
  std::vector<long> exited;
  Eigen::MatrixXd queues;            // rows: ticks, cols: agents
  Eigen::MatrixXd pollutant_totals;  // rows: ticks, cols: pollutants
  Eigen::MatrixXd lane_totals;       // rows: ticks, cols: lane * kNumPollutants + pollutant

  std::size_t size() const { return times.size(); }
  void reserve(std::size_t ticks, const SimState& state);
  void record(const SimState& state);
  /// Drops preallocated rows that were never recorded.
  void trim();
};

/// CSV: t, running_vehicles, queue_<agent>..., <pollutant>_cum..., lane_<id>_<pollutant>...
void write_trace_csv(const EpisodeTrace& trace, const std::filesystem::path& path);
/// CSV: lane_id, length_m
void write_lanes_csv(const EpisodeTrace& trace, const std::filesystem::path& path);
/// Reads a trace; lane lengths come from `lanes_path` (defaults to lanes.csv
/// beside the trace).
EpisodeTrace read_trace_csv(const std::filesystem::path& path, std::filesystem::path lanes_path = {});

}  // namespace ma2c

#endif  // MA2C_TRACE_HPP
