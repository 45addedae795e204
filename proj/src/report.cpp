#include "ma2c/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ma2c/error.hpp"

namespace ma2c {

std::vector<CurvePoint> running_curve(const EpisodeTrace& trace, double episode_seconds) {
  const auto expected = static_cast<std::size_t>(std::llround(episode_seconds));
  if (trace.size() < expected) throw InvalidArgument("running_curve: truncated trace");
  std::vector<CurvePoint> curve;
  curve.reserve(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (std::abs(trace.times[k] - static_cast<double>(k + 1)) > 1e-9)
      throw InvalidArgument("running_curve: trace is not one row per second");
    curve.push_back({trace.times[k], trace.running[k]});
  }
  return curve;
}

namespace {

constexpr double kSecondsPerHour = 3600.0;

void check_intervals(std::vector<Interval> intervals) {
  std::sort(intervals.begin(), intervals.end());
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    if (!(intervals[k].second > intervals[k].first)) throw InvalidArgument("interval_report: empty interval");
    if (k > 0 && intervals[k].first < intervals[k - 1].second)
      throw InvalidArgument("interval_report: overlapping intervals");
  }
}

IntervalReport normalize(Interval interval, const std::vector<std::string>& lane_ids,
                         const std::vector<double>& lane_lengths, Eigen::MatrixXd grams) {
  IntervalReport r;
  r.interval = interval;
  r.lane_ids = lane_ids;
  r.lane_lengths = lane_lengths;
  const double hours = (interval.second - interval.first) / kSecondsPerHour;
  r.normalized = grams;
  double total_km = 0.0;
  for (Eigen::Index l = 0; l < grams.rows(); ++l) {
    const double km = lane_lengths[static_cast<std::size_t>(l)] / 1000.0;
    total_km += km;
    r.normalized.row(l) /= hours * km;
  }
  r.network_grams = grams.colwise().sum().array();
  r.network_normalized = r.network_grams / (hours * total_km);
  r.grams = std::move(grams);
  return r;
}

}  // namespace

std::vector<IntervalReport> interval_report(const EmissionLedger& ledger, const std::vector<std::string>& lane_ids,
                                            const std::vector<double>& lane_lengths) {
  if (lane_ids.size() != ledger.num_lanes() || lane_lengths.size() != ledger.num_lanes())
    throw InvalidArgument("interval_report: lane table does not match the ledger");
  check_intervals(ledger.intervals());
  std::vector<IntervalReport> out;
  for (std::size_t k = 0; k < ledger.intervals().size(); ++k)
    out.push_back(normalize(ledger.intervals()[k], lane_ids, lane_lengths, ledger.interval_totals(k)));
  return out;
}

std::vector<IntervalReport> interval_report(const EpisodeTrace& trace, const std::vector<Interval>& intervals) {
  check_intervals(intervals);
  const auto lanes = static_cast<Eigen::Index>(trace.lane_ids.size());
  // Cumulative lane totals at time t; zero before the first tick.
  auto cumulative_at = [&](double t) -> Eigen::MatrixXd {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(lanes, kNumPollutants);
    if (t <= 0.0) return m;
    for (std::size_t k = 0; k < trace.size(); ++k) {
      if (std::abs(trace.times[k] - t) < 1e-9) {
        for (Eigen::Index l = 0; l < lanes; ++l)
          m.row(l) = trace.lane_totals.row(static_cast<Eigen::Index>(k)).segment(l * kNumPollutants, kNumPollutants);
        return m;
      }
    }
    throw InvalidArgument(fmt::format("interval_report: time {} outside the traced span", t));
  };
  std::vector<IntervalReport> out;
  for (const Interval& iv : intervals)
    out.push_back(
        normalize(iv, trace.lane_ids, trace.lane_lengths, cumulative_at(iv.second) - cumulative_at(iv.first)));
  return out;
}

ComparisonTable comparison_table(const PollutantVector& baseline_grams, const PollutantVector& trained_grams) {
  if ((baseline_grams < 0.0).any() || (trained_grams < 0.0).any())
    throw InvalidArgument("comparison_table: negative emission total");
  // g -> kg for CO2 and CO, mL -> L for fuel
  PollutantVector scale;
  scale << 1e-3, 1e-3, 1.0, 1.0, 1.0, 1e-3;
  ComparisonTable t;
  t.baseline = baseline_grams * scale;
  t.trained = trained_grams * scale;
  for (Eigen::Index p = 0; p < Eigen::Index(kNumPollutants); ++p)
    t.reduction_pct(p) = baseline_grams(p) > 0.0 ? (baseline_grams(p) - trained_grams(p)) / baseline_grams(p) * 100.0 : 0.0;
  return t;
}

namespace {

const std::array<const char*, kNumPollutants> kTableHeaders = {"CO2_kg", "CO_kg", "NOx_g", "PMx_g", "HC_g", "fuel_L"};

}  // namespace

std::string running_curve_csv(const std::vector<CurvePoint>& trained, const std::vector<CurvePoint>& baseline) {
  std::string out = "t,trained_running,baseline_running\n";
  const std::size_t n = std::max(trained.size(), baseline.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double t = k < trained.size() ? trained[k].t : baseline[k].t;
    const std::string a = k < trained.size() ? std::to_string(trained[k].running) : "";
    const std::string b = k < baseline.size() ? std::to_string(baseline[k].running) : "";
    out += fmt::format("{:g},{},{}\n", t, a, b);
  }
  return out;
}

std::string interval_csv_header() {
  std::string out = "controller,lane_id,length_m";
  for (std::size_t p = 0; p < kNumPollutants; ++p) out += fmt::format(",{}_per_h_km", kPollutantNames[p]);
  for (std::size_t p = 0; p < kNumPollutants; ++p) out += fmt::format(",{}_raw", kPollutantNames[p]);
  return out + '\n';
}

std::string interval_csv_rows(const IntervalReport& r, const std::string& controller) {
  std::string out;
  for (Eigen::Index l = 0; l < r.grams.rows(); ++l) {
    out += fmt::format("{},{},{:.17g}", controller, r.lane_ids[static_cast<std::size_t>(l)],
                       r.lane_lengths[static_cast<std::size_t>(l)]);
    for (Eigen::Index p = 0; p < Eigen::Index(kNumPollutants); ++p) out += fmt::format(",{:.17g}", r.normalized(l, p));
    for (Eigen::Index p = 0; p < Eigen::Index(kNumPollutants); ++p) out += fmt::format(",{:.17g}", r.grams(l, p));
    out += '\n';
  }
  double length = 0.0;
  for (double len : r.lane_lengths) length += len;
  out += fmt::format("{},network,{:.17g}", controller, length);
  for (Eigen::Index p = 0; p < Eigen::Index(kNumPollutants); ++p) out += fmt::format(",{:.17g}", r.network_normalized(p));
  for (Eigen::Index p = 0; p < Eigen::Index(kNumPollutants); ++p) out += fmt::format(",{:.17g}", r.network_grams(p));
  return out + '\n';
}

std::string comparison_csv(const ComparisonTable& t) {
  std::string out = "row";
  for (const char* h : kTableHeaders) out += fmt::format(",{}", h);
  out += '\n';
  auto row = [&](const char* name, const PollutantVector& v) {
    out += name;
    for (Eigen::Index p = 0; p < Eigen::Index(kNumPollutants); ++p) out += fmt::format(",{:.9g}", v(p));
    out += '\n';
  };
  row("baseline", t.baseline);
  row("trained", t.trained);
  row("reduction_pct", t.reduction_pct);
  return out;
}

std::string comparison_text(const ComparisonTable& t) {
  std::string out = fmt::format("{:<14}", "");
  for (const char* h : kTableHeaders) out += fmt::format("{:>12}", h);
  out += '\n';
  auto row = [&](const char* name, const PollutantVector& v, const char* spec) {
    out += fmt::format("{:<14}", name);
    for (Eigen::Index p = 0; p < Eigen::Index(kNumPollutants); ++p) out += fmt::format(fmt::runtime(spec), v(p));
    out += '\n';
  };
  row("No Sync", t.baseline, "{:>12.3f}");
  row("Sync (MA2C)", t.trained, "{:>12.3f}");
  row("reduction %", t.reduction_pct, "{:>12.1f}");
  return out;
}

std::string running_curve_svg(const std::vector<CurvePoint>& trained, const std::vector<CurvePoint>& baseline) {
  constexpr double W = 720, H = 360, M = 40;
  double t_max = 1.0, y_max = 1.0;
  for (const auto* c : {&trained, &baseline})
    for (const CurvePoint& p : *c) {
      t_max = std::max(t_max, p.t);
      y_max = std::max(y_max, static_cast<double>(p.running));
    }
  auto polyline = [&](const std::vector<CurvePoint>& c, const char* color) {
    std::string pts;
    for (const CurvePoint& p : c)
      pts += fmt::format("{:.1f},{:.1f} ", M + p.t / t_max * (W - 2 * M),
                         H - M - static_cast<double>(p.running) / y_max * (H - 2 * M));
    return fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)", color, pts);
  };
  std::string svg = fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}">)", W, H);
  svg += '\n';
  svg += fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)", W, H) + '\n';
  svg += fmt::format(R"(<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/>)", M, H - M, W - M) + '\n';
  svg += fmt::format(R"(<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/>)", M, M, H - M) + '\n';
  svg += fmt::format(R"(<text x="{}" y="{}" font-size="12">running vehicles (max {:.0f}) vs time (s, max {:.0f})</text>)",
                     M, M - 10, y_max, t_max) + '\n';
  svg += polyline(baseline, "#c0392b") + '\n';
  svg += polyline(trained, "#2471a3") + '\n';
  svg += fmt::format(R"(<text x="{}" y="{}" font-size="12" fill="#c0392b">No Sync</text>)", W - 120, M) + '\n';
  svg += fmt::format(R"(<text x="{}" y="{}" font-size="12" fill="#2471a3">Sync (MA2C)</text>)", W - 120, M + 16) + '\n';
  svg += "</svg>\n";
  return svg;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

std::string write_report(const EpisodeTrace& trained, const EpisodeTrace& baseline, const std::filesystem::path& out_dir,
                         const std::vector<Interval>& intervals, bool svg) {
  std::filesystem::create_directories(out_dir);
  const double span = trained.times.empty() ? 0.0 : trained.times.back();
  const auto trained_curve = running_curve(trained, span);
  const auto baseline_curve = running_curve(baseline, baseline.times.empty() ? 0.0 : baseline.times.back());
  write_text(out_dir / "running_curve.csv", running_curve_csv(trained_curve, baseline_curve));
  const auto trained_iv = interval_report(trained, intervals);
  const auto baseline_iv = interval_report(baseline, intervals);
  for (std::size_t k = 0; k < intervals.size(); ++k)
    write_text(out_dir / fmt::format("intervals_{:g}_{:g}.csv", intervals[k].first, intervals[k].second),
               interval_csv_header() + interval_csv_rows(baseline_iv[k], "baseline") +
                   interval_csv_rows(trained_iv[k], "trained"));
  if (trained.size() == 0 || baseline.size() == 0) throw InvalidArgument("write_report: empty trace");
  const PollutantVector base = baseline.pollutant_totals.row(baseline.pollutant_totals.rows() - 1).array();
  const PollutantVector ours = trained.pollutant_totals.row(trained.pollutant_totals.rows() - 1).array();
  const ComparisonTable table = comparison_table(base, ours);
  write_text(out_dir / "comparison.csv", comparison_csv(table));
  if (svg) write_text(out_dir / "running_curve.svg", running_curve_svg(trained_curve, baseline_curve));
  return comparison_text(table);
}

}  // namespace ma2c
