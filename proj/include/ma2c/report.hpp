#ifndef MA2C_REPORT_HPP
#define MA2C_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ma2c/emission.hpp"
#include "ma2c/trace.hpp"

namespace ma2c {

struct CurvePoint {
  double t = 0.0;
  long running = 0;
};

/// One point per recorded second. Throws InvalidArgument when the trace
/// does not cover [1, episode_seconds] contiguously.
std::vector<CurvePoint> running_curve(const EpisodeTrace& trace, double episode_seconds = 3600.0);

/// Emissions of one interval, per lane, normalized by interval hours and lane km.
struct IntervalReport {
  Interval interval;
  std::vector<std::string> lane_ids;
  std::vector<double> lane_lengths;  // m
  Eigen::MatrixXd grams;             // rows: lanes, cols: pollutants (fuel in mL)
  Eigen::MatrixXd normalized;        // g/h/km (fuel mL/h/km)
  PollutantVector network_grams = PollutantVector::Zero();
  PollutantVector network_normalized = PollutantVector::Zero();  // by total lane-km
};

/// Uses the ledger's own intervals.
std::vector<IntervalReport> interval_report(const EmissionLedger& ledger, const std::vector<std::string>& lane_ids,
                                            const std::vector<double>& lane_lengths);
/// Arbitrary non-overlapping intervals inside the traced span.
std::vector<IntervalReport> interval_report(const EpisodeTrace& trace,
                                            const std::vector<Interval>& intervals = default_intervals());

/// Baseline vs trained totals in CO2 kg, CO kg, NOx g, PMx g, HC g, fuel L.
struct ComparisonTable {
  PollutantVector baseline = PollutantVector::Zero();
  PollutantVector trained = PollutantVector::Zero();
  PollutantVector reduction_pct = PollutantVector::Zero();  // (baseline - trained) / baseline * 100
};

/// Inputs are raw ledger totals (grams, fuel mL).
ComparisonTable comparison_table(const PollutantVector& baseline_grams, const PollutantVector& trained_grams);
inline ComparisonTable comparison_table(const EmissionLedger& baseline, const EmissionLedger& trained) {
  return comparison_table(baseline.network_totals(), trained.network_totals());
}

std::string running_curve_csv(const std::vector<CurvePoint>& trained, const std::vector<CurvePoint>& baseline);
std::string interval_csv_header();
std::string interval_csv_rows(const IntervalReport& report, const std::string& controller);
std::string comparison_csv(const ComparisonTable& table);
std::string comparison_text(const ComparisonTable& table);
std::string running_curve_svg(const std::vector<CurvePoint>& trained, const std::vector<CurvePoint>& baseline);

/// Writes running_curve.csv, intervals_<t0>_<t1>.csv, comparison.csv and
/// running_curve.svg into `out_dir`. Returns the rendered comparison table.
std::string write_report(const EpisodeTrace& trained, const EpisodeTrace& baseline, const std::filesystem::path& out_dir,
                         const std::vector<Interval>& intervals = default_intervals(), bool svg = true);

}  // namespace ma2c

#endif  // MA2C_REPORT_HPP
