#ifndef MA2C_MICROSIM_HPP
#define MA2C_MICROSIM_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ma2c/emission.hpp"
#include "ma2c/network.hpp"

namespace ma2c {

/// Point-queue model parameters.
struct SimConfig {
  double saturation_rate = 0.5;  // veh/s discharged per green lane
  double vehicle_gap = 7.5;      // m of lane occupied per vehicle
  double yellow_time = 2.0;      // s
  double accel_duration = 4.0;   // s in the accel regime after leaving a queue
  std::vector<Interval> intervals = default_intervals();
};

enum class VehicleState { free_flow, queued, exited };

struct Vehicle {
  int id = 0;
  std::size_t route = 0;
  std::size_t route_index = 0;  // position within the route's lane list
  std::size_t lane = 0;         // lane index, valid unless exited
  double pos = 0.0;             // m from lane start
  double speed = 0.0;           // m/s
  VehicleState state = VehicleState::free_flow;
  double accel_remaining = 0.0;
  Regime last_regime = Regime::none;  // regime booked in the most recent tick
  double inserted_at = 0.0;
  double exited_at = -1.0;
  long last_tick = -1;  // tick in which the vehicle last moved or crossed
};

struct SignalMachine {
  std::size_t agent = 0;
  std::size_t current_phase = 0;
  std::optional<std::size_t> pending_phase;
  double yellow_remaining = 0.0;

  bool operator==(const SignalMachine&) const = default;
};

struct Insertion {
  long time_step = 0;
  std::size_t route = 0;
};

struct InsertionSchedule {
  std::vector<Insertion> entries;
  std::uint64_t seed = 0;

  /// Throws ValidationError on decreasing time steps or unknown routes.
  void validate(const NetworkSpec& spec) const;
};

/// `n_vehicles` insertions spread evenly over [0, window_end) seconds, each on a
/// route drawn with probability proportional to its weight.
InsertionSchedule make_schedule(const NetworkSpec& spec, int n_vehicles, double window_end, std::uint64_t seed);

struct SimState {
  std::shared_ptr<const NetworkSpec> spec;
  SimConfig config;
  EmissionCoefficients coeffs;
  InsertionSchedule schedule;

  double clock = 0.0;
  long ticks = 0;
  std::vector<Vehicle> vehicles;                 // every inserted vehicle, by id
  std::vector<std::vector<int>> lane_vehicles;   // per lane, front (stop line) first
  std::vector<double> discharge_credit;          // per lane, vehicles allowed to cross
  std::vector<SignalMachine> signals;            // per agent
  EmissionLedger ledger;

  std::size_t next_entry = 0;     // first schedule entry not yet due
  std::vector<Insertion> pending; // due but deferred (entry lane full)
  long inserted = 0;
  long exited = 0;
  long deferred_total = 0;        // vehicles that had to wait at least one tick

  long active() const { return inserted - exited; }
  /// Nothing left to insert: schedule consumed and no deferred vehicles.
  bool insertions_done() const { return next_entry == schedule.entries.size() && pending.empty(); }
};

SimState init_sim(std::shared_ptr<const NetworkSpec> spec, InsertionSchedule schedule, EmissionCoefficients coeffs,
                  SimConfig config = {});
SimState init_sim(const NetworkSpec& spec, InsertionSchedule schedule, EmissionCoefficients coeffs,
                  SimConfig config = {});

/// Requests `phase` at `agent`. A change starts (or redirects) a yellow
/// transition; redirecting never restarts the yellow clock.
void apply_action(SimState& state, std::size_t agent, std::size_t phase);

/// Advances the clock by `dt` seconds.
void step(SimState& state, double dt = 1.0);

/// True when `lane` may discharge: unsignalized, or green and not in yellow.
bool lane_is_green(const SimState& state, std::size_t lane);

/// Vehicles within `sensor_zone` of the stop line, per incoming lane of `agent`.
Eigen::VectorXd measure_wave(const SimState& state, std::size_t agent);
/// Vehicles slower than 0.1 m/s over all incoming lanes of `agent`.
long measure_queue(const SimState& state, std::size_t agent);
long running_vehicles(const SimState& state);

inline constexpr double kQueueSpeed = 0.1;  // m/s

}  // namespace ma2c

#endif  // MA2C_MICROSIM_HPP
