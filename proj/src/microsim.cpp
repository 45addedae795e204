#include "ma2c/microsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ma2c/error.hpp"

namespace ma2c {

namespace {

std::size_t lane_capacity(const Lane& lane, double gap) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(lane.length / gap + 1e-9)));
}

}  // namespace

void InsertionSchedule::validate(const NetworkSpec& spec) const {
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (entries[k].time_step < 0) throw ValidationError("schedule entry " + std::to_string(k) + ": negative time");
    if (k > 0 && entries[k].time_step < entries[k - 1].time_step)
      throw ValidationError("schedule entry " + std::to_string(k) + ": time steps must be non-decreasing");
    if (entries[k].route >= spec.routes.size())
      throw ValidationError("schedule entry " + std::to_string(k) + ": route index out of range");
  }
}

InsertionSchedule make_schedule(const NetworkSpec& spec, int n_vehicles, double window_end, std::uint64_t seed) {
  if (n_vehicles < 0 || !(window_end > 0.0)) throw InvalidArgument("make_schedule: bad demand parameters");
  if (spec.routes.empty() && n_vehicles > 0) throw InvalidArgument("make_schedule: network has no routes");
  InsertionSchedule schedule;
  schedule.seed = seed;
  std::vector<double> weights;
  for (const Route& r : spec.routes) weights.push_back(r.weight);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  schedule.entries.reserve(static_cast<std::size_t>(n_vehicles));
  for (int k = 0; k < n_vehicles; ++k) {
    const auto t = static_cast<long>(std::floor(static_cast<double>(k) * window_end / n_vehicles));
    schedule.entries.push_back({t, pick(rng)});
  }
  return schedule;
}

SimState init_sim(std::shared_ptr<const NetworkSpec> spec, InsertionSchedule schedule, EmissionCoefficients coeffs,
                  SimConfig config) {
  if (!spec) throw InvalidArgument("init_sim: null network");
  if (!(config.saturation_rate > 0.0) || !(config.vehicle_gap > 0.0) || config.yellow_time < 0.0 ||
      config.accel_duration < 0.0)
    throw InvalidArgument("init_sim: bad simulator configuration");
  schedule.validate(*spec);
  coeffs.validate();

  SimState s;
  s.spec = std::move(spec);
  s.config = std::move(config);
  s.coeffs = coeffs;
  s.schedule = std::move(schedule);
  const std::size_t num_lanes = s.spec->lanes.size();
  s.lane_vehicles.assign(num_lanes, {});
  s.discharge_credit.assign(num_lanes, 0.0);
  for (std::size_t a = 0; a < s.spec->num_agents(); ++a) s.signals.push_back({a, 0, std::nullopt, 0.0});
  s.ledger = EmissionLedger(num_lanes, s.config.intervals);
  return s;
}

SimState init_sim(const NetworkSpec& spec, InsertionSchedule schedule, EmissionCoefficients coeffs,
                  SimConfig config) {
  return init_sim(std::make_shared<const NetworkSpec>(spec), std::move(schedule), coeffs, std::move(config));
}

void apply_action(SimState& state, std::size_t agent, std::size_t phase) {
  if (agent >= state.signals.size()) throw InvalidArgument("apply_action: unknown agent " + std::to_string(agent));
  if (phase >= state.spec->num_phases(agent))
    throw InvalidArgument("apply_action: agent '" + state.spec->agent_id(agent) + "' has no phase " +
                          std::to_string(phase));
  SignalMachine& sig = state.signals[agent];
  if (phase == sig.current_phase) return;
  if (sig.yellow_remaining > 0.0) {
    sig.pending_phase = phase;
    return;
  }
  if (state.config.yellow_time <= 0.0) {
    sig.current_phase = phase;
    return;
  }
  sig.pending_phase = phase;
  sig.yellow_remaining = state.config.yellow_time;
}

bool lane_is_green(const SimState& state, std::size_t lane) {
  const std::size_t a = state.spec->controlling_agent(lane);
  if (a == NetworkSpec::npos) return true;
  const SignalMachine& sig = state.signals[a];
  if (sig.yellow_remaining > 0.0) return false;
  return state.spec->phase_masks(a)[sig.current_phase][state.spec->slot_in_agent(lane)];
}

void step(SimState& s, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be > 0");
  const NetworkSpec& spec = *s.spec;
  const SimConfig& cfg = s.config;
  const double t0 = s.clock;
  const long tick = s.ticks;

  // Insertions due by now join the back of their entry lane, or wait.
  const std::size_t first_new = s.pending.size();
  while (s.next_entry < s.schedule.entries.size() &&
         static_cast<double>(s.schedule.entries[s.next_entry].time_step) <= t0 + 1e-9)
    s.pending.push_back(s.schedule.entries[s.next_entry++]);
  {
    std::vector<Insertion> still_waiting;
    for (std::size_t k = 0; k < s.pending.size(); ++k) {
      const Insertion& ins = s.pending[k];
      const std::size_t entry_lane = spec.route_lanes(ins.route).front();
      if (s.lane_vehicles[entry_lane].size() >= lane_capacity(spec.lanes[entry_lane], cfg.vehicle_gap)) {
        if (k >= first_new) ++s.deferred_total;
        still_waiting.push_back(ins);
        continue;
      }
      Vehicle v;
      v.id = static_cast<int>(s.vehicles.size());
      v.route = ins.route;
      v.route_index = 0;
      v.lane = entry_lane;
      v.pos = 0.0;
      v.speed = spec.lanes[entry_lane].free_speed;
      v.inserted_at = t0;
      s.lane_vehicles[entry_lane].push_back(v.id);
      s.vehicles.push_back(v);
      ++s.inserted;
    }
    s.pending = std::move(still_waiting);
  }

  auto book = [&](Vehicle& v, std::size_t lane, Regime regime) {
    v.last_regime = regime;
    s.ledger.accrue(lane, t0, s.coeffs.rate(regime) * dt);
  };
  auto moving_regime = [&](Vehicle& v) {
    if (v.accel_remaining > 0.0) {
      v.accel_remaining = std::max(0.0, v.accel_remaining - dt);
      return Regime::accel;
    }
    return Regime::cruise;
  };

  for (std::size_t l = 0; l < spec.lanes.size(); ++l) {
    const Lane& lane = spec.lanes[l];
    const bool controlled = spec.controlling_agent(l) != NetworkSpec::npos;
    const bool green = lane_is_green(s, l);
    double& credit = s.discharge_credit[l];
    if (controlled)
      credit = green ? std::min(credit + cfg.saturation_rate * dt, std::max(1.0, cfg.saturation_rate * dt)) : 0.0;

    // Crossing the stop line: needs green, a discharge slot, and room downstream.
    auto try_cross = [&](Vehicle& v) {
      if (!green) return false;
      if (controlled && credit < 1.0 - 1e-9) return false;
      const auto& route = spec.route_lanes(v.route);
      const bool last = v.route_index + 1 == route.size();
      if (!last) {
        const std::size_t next = route[v.route_index + 1];
        if (s.lane_vehicles[next].size() >= lane_capacity(spec.lanes[next], cfg.vehicle_gap)) return false;
      }
      if (controlled) credit -= 1.0;
      if (v.state == VehicleState::queued) v.accel_remaining = cfg.accel_duration;
      book(v, l, moving_regime(v));
      v.last_tick = tick;
      if (last) {
        v.state = VehicleState::exited;
        v.speed = 0.0;
        v.exited_at = t0 + dt;
        ++s.exited;
      } else {
        const std::size_t next = route[++v.route_index];
        v.lane = next;
        v.pos = 0.0;
        v.state = VehicleState::free_flow;
        v.speed = spec.lanes[next].free_speed;
        s.lane_vehicles[next].push_back(v.id);
      }
      return true;
    };

    std::vector<int> kept;
    kept.reserve(s.lane_vehicles[l].size());
    std::size_t stopped = 0;
    for (int vid : s.lane_vehicles[l]) {
      Vehicle& v = s.vehicles[static_cast<std::size_t>(vid)];
      if (v.last_tick == tick) {  // arrived from upstream during this tick
        kept.push_back(vid);
        continue;
      }
      const double stop_pos = lane.length - static_cast<double>(stopped) * cfg.vehicle_gap;
      if (v.state == VehicleState::queued) {
        if (stopped == 0 && try_cross(v)) continue;
        v.pos = stop_pos;
        ++stopped;
        book(v, l, Regime::idle);
        kept.push_back(vid);
        continue;
      }
      const double next_pos = v.pos + v.speed * dt;
      if (next_pos >= stop_pos - 1e-9) {
        if (stopped == 0 && try_cross(v)) continue;
        v.state = VehicleState::queued;
        v.speed = 0.0;
        v.pos = stop_pos;
        v.accel_remaining = 0.0;
        ++stopped;
        book(v, l, Regime::idle);
      } else {
        v.pos = next_pos;
        book(v, l, moving_regime(v));
      }
      kept.push_back(vid);
    }
    s.lane_vehicles[l] = std::move(kept);
  }

  for (SignalMachine& sig : s.signals) {
    if (sig.yellow_remaining <= 0.0) continue;
    sig.yellow_remaining -= dt;
    if (sig.yellow_remaining <= 1e-9) {
      sig.yellow_remaining = 0.0;
      sig.current_phase = *sig.pending_phase;
      sig.pending_phase.reset();
    }
  }

  s.clock = t0 + dt;
  ++s.ticks;
}

Eigen::VectorXd measure_wave(const SimState& state, std::size_t agent) {
  if (agent >= state.signals.size()) throw InvalidArgument("measure_wave: unknown agent");
  const auto& lanes = state.spec->agent_lanes(agent);
  Eigen::VectorXd wave(static_cast<Eigen::Index>(lanes.size()));
  for (std::size_t k = 0; k < lanes.size(); ++k) {
    const Lane& lane = state.spec->lanes[lanes[k]];
    long count = 0;
    for (int vid : state.lane_vehicles[lanes[k]])
      if (lane.length - state.vehicles[static_cast<std::size_t>(vid)].pos <= lane.sensor_zone + 1e-9) ++count;
    wave(static_cast<Eigen::Index>(k)) = static_cast<double>(count);
  }
  return wave;
}

long measure_queue(const SimState& state, std::size_t agent) {
  if (agent >= state.signals.size()) throw InvalidArgument("measure_queue: unknown agent");
  long count = 0;
  for (std::size_t l : state.spec->agent_lanes(agent))
    for (int vid : state.lane_vehicles[l])
      if (state.vehicles[static_cast<std::size_t>(vid)].speed < kQueueSpeed) ++count;
  return count;
}

long running_vehicles(const SimState& state) { return state.inserted - state.exited; }

}  // namespace ma2c
