#ifndef MA2C_EMISSION_HPP
#define MA2C_EMISSION_HPP

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace ma2c {

enum class Pollutant : int { CO2 = 0, CO, NOx, PMx, HC, fuel };
inline constexpr std::size_t kNumPollutants = 6;
inline constexpr std::array<std::string_view, kNumPollutants> kPollutantNames = {"CO2", "CO", "NOx", "PMx", "HC",
                                                                                "fuel"};

/// Per-pollutant quantities, ordered as `Pollutant`. Grams, except fuel in mL.
using PollutantVector = Eigen::Array<double, 1, kNumPollutants>;

std::size_t pollutant_index(std::string_view name);

enum class Regime : int { none = 0, idle, cruise, accel };

/// Three-regime emission rate table, one row per pollutant (g/s, fuel mL/s).
struct EmissionCoefficients {
  PollutantVector idle = PollutantVector::Zero();
  PollutantVector cruise = PollutantVector::Zero();
  PollutantVector accel = PollutantVector::Zero();

  const PollutantVector& rate(Regime regime) const;
  /// Throws ValidationError unless accel >= cruise >= idle > 0 for every pollutant.
  void validate() const;

  static EmissionCoefficients defaults();
};

EmissionCoefficients parse_emission_coefficients(const std::string& text);
EmissionCoefficients load_emission_coefficients(const std::filesystem::path& path);
std::string emission_coefficients_to_json(const EmissionCoefficients& coeffs);

using Interval = std::pair<double, double>;
std::vector<Interval> default_intervals();

/// Cumulative emitted mass per (lane, pollutant), network totals, and
/// per-interval per-lane subtotals. A tick starting at time t is booked
/// into the interval with t0 <= t < t1.
class EmissionLedger {
 public:
  EmissionLedger() = default;
  EmissionLedger(std::size_t num_lanes, std::vector<Interval> intervals);

  void accrue(std::size_t lane, double tick_start, const PollutantVector& mass);

  std::size_t num_lanes() const { return static_cast<std::size_t>(lane_totals_.rows()); }
  const std::vector<Interval>& intervals() const { return intervals_; }

  /// rows: lanes, cols: pollutants
  const Eigen::MatrixXd& lane_totals() const { return lane_totals_; }
  const PollutantVector& network_totals() const { return network_totals_; }
  const Eigen::MatrixXd& interval_totals(std::size_t k) const { return interval_totals_[k]; }

  bool operator==(const EmissionLedger& other) const;

 private:
  std::vector<Interval> intervals_;
  Eigen::MatrixXd lane_totals_;
  PollutantVector network_totals_ = PollutantVector::Zero();
  std::vector<Eigen::MatrixXd> interval_totals_;
};

}  // namespace ma2c

#endif  // MA2C_EMISSION_HPP
