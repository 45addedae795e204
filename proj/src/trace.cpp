#include "ma2c/trace.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ma2c/error.hpp"

namespace ma2c {

void EpisodeTrace::reserve(std::size_t ticks, const SimState& state) {
  agent_ids.clear();
  lane_ids.clear();
  lane_lengths.clear();
  for (std::size_t a = 0; a < state.spec->num_agents(); ++a) agent_ids.push_back(state.spec->agent_id(a));
  for (const Lane& lane : state.spec->lanes) {
    lane_ids.push_back(lane.id);
    lane_lengths.push_back(lane.length);
  }
  times.reserve(ticks);
  running.reserve(ticks);
  inserted.reserve(ticks);
  exited.reserve(ticks);
  const auto rows = static_cast<Eigen::Index>(ticks);
  queues.resize(rows, static_cast<Eigen::Index>(agent_ids.size()));
  pollutant_totals.resize(rows, kNumPollutants);
  lane_totals.resize(rows, static_cast<Eigen::Index>(lane_ids.size() * kNumPollutants));
}

void EpisodeTrace::record(const SimState& state) {
  const auto row = static_cast<Eigen::Index>(times.size());
  if (row >= queues.rows()) {
    const Eigen::Index grow = std::max<Eigen::Index>(16, row);
    queues.conservativeResize(row + grow, Eigen::NoChange);
    pollutant_totals.conservativeResize(row + grow, Eigen::NoChange);
    lane_totals.conservativeResize(row + grow, Eigen::NoChange);
  }
  times.push_back(state.clock);
  running.push_back(running_vehicles(state));
  inserted.push_back(state.inserted);
  exited.push_back(state.exited);
  for (std::size_t a = 0; a < agent_ids.size(); ++a)
    queues(row, static_cast<Eigen::Index>(a)) = static_cast<double>(measure_queue(state, a));
  pollutant_totals.row(row) = state.ledger.network_totals().matrix();
  const Eigen::MatrixXd& lanes = state.ledger.lane_totals();
  for (Eigen::Index l = 0; l < lanes.rows(); ++l)
    lane_totals.row(row).segment(l * kNumPollutants, kNumPollutants) = lanes.row(l);
}

void EpisodeTrace::trim() {
  const auto n = static_cast<Eigen::Index>(times.size());
  queues.conservativeResize(n, Eigen::NoChange);
  pollutant_totals.conservativeResize(n, Eigen::NoChange);
  lane_totals.conservativeResize(n, Eigen::NoChange);
}

namespace {

std::string unit_suffix(std::size_t p) { return p == static_cast<std::size_t>(Pollutant::fuel) ? "mL" : "g"; }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_trace_csv(const EpisodeTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "t,running_vehicles,inserted,exited";
  for (const auto& id : trace.agent_ids) out << ",queue_" << id;
  for (std::size_t p = 0; p < kNumPollutants; ++p) out << ',' << kPollutantNames[p] << '_' << unit_suffix(p);
  for (const auto& id : trace.lane_ids)
    for (std::size_t p = 0; p < kNumPollutants; ++p) out << ",lane_" << id << '_' << kPollutantNames[p];
  out << '\n';
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    out << fmt::format("{:g},{},{},{}", trace.times[k], trace.running[k], trace.inserted[k], trace.exited[k]);
    for (Eigen::Index a = 0; a < trace.queues.cols(); ++a) out << fmt::format(",{:g}", trace.queues(row, a));
    for (Eigen::Index p = 0; p < trace.pollutant_totals.cols(); ++p)
      out << fmt::format(",{:.17g}", trace.pollutant_totals(row, p));
    for (Eigen::Index c = 0; c < trace.lane_totals.cols(); ++c)
      out << fmt::format(",{:.17g}", trace.lane_totals(row, c));
    out << '\n';
  }
}

void write_lanes_csv(const EpisodeTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "lane_id,length_m\n";
  for (std::size_t l = 0; l < trace.lane_ids.size(); ++l)
    out << fmt::format("{},{:.17g}\n", trace.lane_ids[l], trace.lane_lengths[l]);
}

EpisodeTrace read_trace_csv(const std::filesystem::path& path, std::filesystem::path lanes_path) {
  if (lanes_path.empty()) lanes_path = path.parent_path() / "lanes.csv";
  EpisodeTrace trace;
  {
    std::ifstream in(lanes_path);
    if (!in) throw ParseError("cannot open lane table '" + lanes_path.string() + "'");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split(line);
      if (cells.size() != 2) throw ParseError("lane table: malformed row '" + line + "'");
      trace.lane_ids.push_back(cells[0]);
      trace.lane_lengths.push_back(std::stod(cells[1]));
    }
  }

  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trace: empty file");
  const auto header = split(line);
  std::size_t n_agents = 0;
  for (const auto& h : header)
    if (h.rfind("queue_", 0) == 0) {
      trace.agent_ids.push_back(h.substr(6));
      ++n_agents;
    }
  const std::size_t n_lane_cols = trace.lane_ids.size() * kNumPollutants;
  const std::size_t expected = 4 + n_agents + kNumPollutants + n_lane_cols;
  if (header.size() != expected) throw ParseError("trace: header does not match the lane table");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != expected) throw ParseError("trace: row with " + std::to_string(cells.size()) + " cells");
    std::vector<double> v;
    v.reserve(cells.size());
    try {
      for (const auto& c : cells) v.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw ParseError("trace: non-numeric cell in '" + line + "'");
    }
    rows.push_back(std::move(v));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  trace.queues.resize(n, static_cast<Eigen::Index>(n_agents));
  trace.pollutant_totals.resize(n, kNumPollutants);
  trace.lane_totals.resize(n, static_cast<Eigen::Index>(n_lane_cols));
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& v = rows[static_cast<std::size_t>(k)];
    trace.times.push_back(v[0]);
    trace.running.push_back(static_cast<long>(v[1]));
    trace.inserted.push_back(static_cast<long>(v[2]));
    trace.exited.push_back(static_cast<long>(v[3]));
    std::size_t at = 4;
    for (std::size_t a = 0; a < n_agents; ++a) trace.queues(k, static_cast<Eigen::Index>(a)) = v[at++];
    for (std::size_t p = 0; p < kNumPollutants; ++p) trace.pollutant_totals(k, static_cast<Eigen::Index>(p)) = v[at++];
    for (std::size_t c = 0; c < n_lane_cols; ++c) trace.lane_totals(k, static_cast<Eigen::Index>(c)) = v[at++];
  }
  return trace;
}

}  // namespace ma2c
