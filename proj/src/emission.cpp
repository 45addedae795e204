#include "ma2c/emission.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ma2c/error.hpp"

namespace ma2c {

using nlohmann::json;

std::size_t pollutant_index(std::string_view name) {
  for (std::size_t p = 0; p < kNumPollutants; ++p)
    if (kPollutantNames[p] == name) return p;
  throw InvalidArgument("unknown pollutant '" + std::string(name) + "'");
}

const PollutantVector& EmissionCoefficients::rate(Regime regime) const {
  switch (regime) {
    case Regime::idle:
      return idle;
    case Regime::cruise:
      return cruise;
    case Regime::accel:
      return accel;
    default:
      throw InvalidArgument("no emission rate for regime 'none'");
  }
}

void EmissionCoefficients::validate() const {
  for (std::size_t p = 0; p < kNumPollutants; ++p) {
    const std::string name(kPollutantNames[p]);
    if (!(idle(p) > 0.0)) throw ValidationError("emissions " + name + ": idle rate must be > 0");
    if (!(cruise(p) >= idle(p))) throw ValidationError("emissions " + name + ": cruise rate below idle rate");
    if (!(accel(p) >= cruise(p))) throw ValidationError("emissions " + name + ": accel rate below cruise rate");
  }
}

// Light-duty petrol car, order-of-magnitude values. accel defaults to 2x cruise.
EmissionCoefficients EmissionCoefficients::defaults() {
  EmissionCoefficients c;
  //          CO2    CO      NOx      PMx       HC       fuel (mL/s)
  c.idle << 1.40, 0.060, 0.00060, 0.000030, 0.00040, 0.60;
  c.cruise << 2.60, 0.080, 0.00110, 0.000050, 0.00055, 1.10;
  c.accel = 2.0 * c.cruise;
  return c;
}

EmissionCoefficients parse_emission_coefficients(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("emissions: ") + e.what());
  }
  EmissionCoefficients c;
  for (std::size_t p = 0; p < kNumPollutants; ++p) {
    const std::string name(kPollutantNames[p]);
    if (!doc.contains(name)) throw ParseError("emissions: missing pollutant '" + name + "'");
    const json& row = doc.at(name);
    try {
      c.idle(p) = row.at("idle").get<double>();
      c.cruise(p) = row.at("cruise").get<double>();
      c.accel(p) = row.contains("accel") ? row.at("accel").get<double>() : 2.0 * c.cruise(p);
    } catch (const json::exception& e) {
      throw ParseError("emissions " + name + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

EmissionCoefficients load_emission_coefficients(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open emission file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_emission_coefficients(buffer.str());
}

std::string emission_coefficients_to_json(const EmissionCoefficients& c) {
  json doc;
  for (std::size_t p = 0; p < kNumPollutants; ++p)
    doc[std::string(kPollutantNames[p])] = {{"idle", c.idle(p)}, {"cruise", c.cruise(p)}, {"accel", c.accel(p)}};
  return doc.dump(2);
}

std::vector<Interval> default_intervals() { return {{0.0, 1000.0}, {1000.0, 2000.0}, {2000.0, 3600.0}}; }

EmissionLedger::EmissionLedger(std::size_t num_lanes, std::vector<Interval> intervals)
    : intervals_(std::move(intervals)),
      lane_totals_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_lanes), kNumPollutants)),
      interval_totals_(intervals_.size(), lane_totals_) {}

void EmissionLedger::accrue(std::size_t lane, double tick_start, const PollutantVector& mass) {
  const auto row = static_cast<Eigen::Index>(lane);
  lane_totals_.row(row) += mass.matrix();
  network_totals_ += mass;
  for (std::size_t k = 0; k < intervals_.size(); ++k) {
    if (tick_start >= intervals_[k].first && tick_start < intervals_[k].second) {
      interval_totals_[k].row(row) += mass.matrix();
      break;
    }
  }
}

bool EmissionLedger::operator==(const EmissionLedger& other) const {
  if (intervals_ != other.intervals_ || interval_totals_.size() != other.interval_totals_.size()) return false;
  if (lane_totals_.rows() != other.lane_totals_.rows() || lane_totals_ != other.lane_totals_) return false;
  if (!(network_totals_ == other.network_totals_).all()) return false;
  for (std::size_t k = 0; k < interval_totals_.size(); ++k)
    if (interval_totals_[k] != other.interval_totals_[k]) return false;
  return true;
}

}  // namespace ma2c
