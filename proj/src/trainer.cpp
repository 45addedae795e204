#include "ma2c/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "ma2c/checkpoint.hpp"
#include "ma2c/error.hpp"
#include "ma2c/random.hpp"

namespace ma2c {

Ma2cModel make_model(std::shared_ptr<const NetworkSpec> spec, const TrainConfig& config) {
  config.validate();
  Ma2cModel model;
  model.spec = std::move(spec);
  model.neighbors = neighbor_graph(*model.spec);
  model.hp = config.hp;
  const NetworkSpec& net = *model.spec;
  for (std::size_t a = 0; a < net.num_agents(); ++a) {
    int wave_dim = static_cast<int>(net.agent_lanes(a).size());
    int fp_dim = 0;
    for (std::size_t j : model.neighbors[a]) {
      wave_dim += static_cast<int>(net.agent_lanes(j).size());
      fp_dim += static_cast<int>(net.num_phases(j));
    }
    model.nets.push_back(nn::init_params<double>(wave_dim, fp_dim, static_cast<int>(net.num_phases(a)),
                                                 mix_seed(config.seed, a), config.widths, config.hp.rms_decay,
                                                 config.hp.rms_epsilon));
  }
  return model;
}

AgentGradients compute_gradients(const AgentNet& net, const ExperienceBuffer& buffer, double bootstrap,
                                 const HyperParams& hp) {
  const auto T = static_cast<Eigen::Index>(buffer.size());
  if (T == 0) throw InvalidArgument("compute_gradients: empty buffer");

  Eigen::VectorXd spatial(T), frozen(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Transition& tr = buffer.tuples[static_cast<std::size_t>(t)];
    spatial(t) = spatial_discount<double>(tr.reward, tr.neighbor_rewards, hp.alpha);
    frozen(t) = tr.value;
  }
  const Eigen::VectorXd returns = n_step_returns<double>(spatial, bootstrap, hp.gamma);
  const Eigen::VectorXd adv = advantage<double>(returns, frozen);

  std::vector<nn::StepCache<double>> actor_caches, critic_caches;
  actor_caches.reserve(buffer.size());
  critic_caches.reserve(buffer.size());
  nn::LstmState<double> actor_state = buffer.actor_start, critic_state = buffer.critic_start;
  for (const Transition& tr : buffer.tuples) {
    const Eigen::VectorXd xw = tr.obs.wave_input(), xf = tr.obs.fingerprint_input();
    actor_caches.push_back(net.actor.forward(xw, xf, actor_state));
    critic_caches.push_back(net.critic.forward(xw, xf, critic_state));
  }

  const Eigen::Index n_actions = net.actor.shape().outputs;
  Eigen::MatrixXd policies(n_actions, T);
  Eigen::VectorXd log_probs(T), values(T);
  std::vector<Eigen::VectorXd> actor_out_grads, critic_out_grads;
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto& ak = actor_caches[static_cast<std::size_t>(t)];
    const std::size_t action = buffer.tuples[static_cast<std::size_t>(t)].action;
    policies.col(t) = ak.policy;
    log_probs(t) = std::log(ak.policy(static_cast<Eigen::Index>(action)));
    values(t) = critic_caches[static_cast<std::size_t>(t)].output(0);
    actor_out_grads.push_back(actor_logit_gradient<double>(ak.policy, action, adv(t), hp.beta));
    critic_out_grads.push_back(Eigen::VectorXd::Constant(1, critic_value_gradient<double>(returns(t), values(t),
                                                                                           hp.xi_critic)));
  }

  AgentGradients out;
  out.actor = net.actor.backward(actor_caches, actor_out_grads);
  out.critic = net.critic.backward(critic_caches, critic_out_grads);
  out.stats.actor_loss = actor_loss<double>(log_probs, adv, policies, hp.beta);
  out.stats.critic_loss = critic_loss<double>(returns, values);
  out.stats.mean_return = returns.mean();
  out.stats.mean_value = values.mean();
  double ent = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) ent -= neg_entropy<double>(policies.col(t));
  out.stats.mean_entropy = ent / static_cast<double>(T);
  return out;
}

UpdateStats update_agent(AgentNet& net, const ExperienceBuffer& buffer, double bootstrap, const HyperParams& hp) {
  AgentGradients g = compute_gradients(net, buffer, bootstrap, hp);
  g.stats.actor_grad_norm = nn::clip_by_global_norm<double>(g.actor, hp.grad_clip);
  g.stats.critic_grad_norm = nn::clip_by_global_norm<double>(g.critic, hp.grad_clip);
  net.actor_opt.step(net.actor.params(), g.actor, hp.eta_actor);
  net.critic_opt.step(net.critic.params(), g.critic, hp.eta_critic);
  return g.stats;
}

std::vector<UpdateStats> update_agents(std::vector<AgentNet>& nets, const std::vector<ExperienceBuffer>& buffers,
                                       const std::vector<double>& bootstraps, const HyperParams& hp,
                                       std::vector<std::size_t> order) {
  if (buffers.size() != nets.size() || bootstraps.size() != nets.size())
    throw InvalidArgument("update_agents: one buffer and bootstrap per agent required");
  if (order.empty()) {
    order.resize(nets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
  }
  std::vector<UpdateStats> stats(nets.size());
  for (std::size_t a : order) {
    if (a >= nets.size()) throw InvalidArgument("update_agents: bad agent in order");
    stats[a] = update_agent(nets[a], buffers[a], bootstraps[a], hp);
  }
  return stats;
}

namespace {

std::vector<Eigen::VectorXd> measure_all_waves(const SimState& sim) {
  std::vector<Eigen::VectorXd> waves;
  for (std::size_t a = 0; a < sim.signals.size(); ++a) waves.push_back(measure_wave(sim, a));
  return waves;
}

std::vector<Observation<double>> observe_all(const Ma2cModel& model, const SimState& sim,
                                             const std::vector<Eigen::VectorXd>& fingerprints) {
  const auto waves = measure_all_waves(sim);
  std::vector<Observation<double>> obs;
  for (std::size_t a = 0; a < waves.size(); ++a)
    obs.push_back(assemble_observation<double>(waves, fingerprints, a, model.neighbors[a], model.hp.alpha,
                                               model.hp.wave_norm));
  return obs;
}

std::size_t sample(const Eigen::VectorXd& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    acc += p(k);
    if (u < acc) return static_cast<std::size_t>(k);
  }
  return static_cast<std::size_t>(p.size() - 1);
}

std::size_t argmax(const Eigen::VectorXd& p) {
  Eigen::Index best = 0;
  p.maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

void start_log(EpisodeLog& log, int steps, std::size_t agents) {
  const auto n = static_cast<Eigen::Index>(agents);
  log.rewards = Eigen::MatrixXd::Zero(steps, n);
  log.queues = Eigen::MatrixXd::Zero(steps, n);
  log.actions = Eigen::MatrixXi::Zero(steps, n);
  log.entropies = Eigen::MatrixXd::Zero(steps, n);
}

// Advances `ticks` seconds, tracking the clearance time and the trace.
void advance(SimState& sim, int ticks, EpisodeLog& log) {
  for (int k = 0; k < ticks; ++k) {
    step(sim, 1.0);
    if (log.trace) log.trace->record(sim);
    if (log.cleared_at < 0.0 && sim.insertions_done() && running_vehicles(sim) == 0) log.cleared_at = sim.clock;
  }
}

void finish_log(EpisodeLog& log, const SimState& sim) {
  log.cumulative_reward = log.rewards.sum();
  log.cumulative_queue = log.queues.sum();
  log.final_running = running_vehicles(sim);
  log.inserted = sim.inserted;
  log.exited = sim.exited;
  log.deferred = sim.deferred_total;
  log.ledger = sim.ledger;
  if (log.trace) log.trace->trim();
}

}  // namespace

EpisodeLog run_episode(Ma2cModel& model, const InsertionSchedule& schedule, const TrainConfig& config, Mode mode,
                       std::uint64_t seed, const EpisodeOptions& options) {
  const HyperParams& hp = model.hp;
  const std::size_t n = model.nets.size();
  const int steps = hp.steps_per_episode();
  SimState sim = init_sim(model.spec, schedule, config.emissions, config.sim);
  std::mt19937_64 rng(seed);

  EpisodeLog log;
  start_log(log, steps, n);
  if (options.record_trace) {
    log.trace.emplace();
    log.trace->reserve(static_cast<std::size_t>(hp.episode_seconds), sim);
  }

  std::vector<Eigen::VectorXd> fingerprints;
  std::vector<ExperienceBuffer> buffers(n);
  for (std::size_t a = 0; a < n; ++a) {
    model.nets[a].reset_state();
    const auto k = static_cast<Eigen::Index>(model.nets[a].num_actions());
    fingerprints.push_back(Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k)));
    buffers[a].restart(model.nets[a]);
  }

  std::vector<Observation<double>> prev_obs;
  std::vector<std::size_t> prev_action(n);
  std::vector<double> prev_value(n);

  auto push_transitions = [&](const std::vector<Observation<double>>& next_obs, int k) {
    for (std::size_t a = 0; a < n; ++a) {
      Transition tr;
      tr.obs = prev_obs[a];
      tr.action = prev_action[a];
      tr.next_obs = next_obs[a];
      tr.reward = log.rewards(k, static_cast<Eigen::Index>(a));
      for (std::size_t j : model.neighbors[a]) tr.neighbor_rewards.push_back(log.rewards(k, static_cast<Eigen::Index>(j)));
      tr.value = prev_value[a];
      buffers[a].tuples.push_back(std::move(tr));
    }
  };
  auto update_round = [&](const std::vector<double>& bootstraps) {
    const auto stats = update_agents(model.nets, buffers, bootstraps, hp);
    ++log.update_rounds;
    if (options.on_update) options.on_update(stats);
    for (std::size_t a = 0; a < n; ++a) buffers[a].restart(model.nets[a]);
  };

  for (int k = 0; k < steps; ++k) {
    auto obs = observe_all(model, sim, fingerprints);
    if (k > 0 && mode == Mode::train) {
      push_transitions(obs, k - 1);
      if (buffers[0].size() >= static_cast<std::size_t>(hp.batch_size)) {
        std::vector<double> bootstraps(n);
        for (std::size_t a = 0; a < n; ++a) bootstraps[a] = nn::peek_value(model.nets[a], obs[a]);
        update_round(bootstraps);
      }
    }
    std::vector<Eigen::VectorXd> policies(n);
    for (std::size_t a = 0; a < n; ++a) {
      auto out = nn::forward(model.nets[a], obs[a]);
      const std::size_t action = mode == Mode::train ? sample(out.policy, rng) : argmax(out.policy);
      apply_action(sim, a, action);
      log.actions(k, static_cast<Eigen::Index>(a)) = static_cast<int>(action);
      log.entropies(k, static_cast<Eigen::Index>(a)) = -neg_entropy<double>(out.policy);
      prev_action[a] = action;
      prev_value[a] = out.value;
      policies[a] = std::move(out.policy);
    }
    fingerprints = std::move(policies);
    prev_obs = std::move(obs);

    advance(sim, hp.delta_t, log);
    for (std::size_t a = 0; a < n; ++a) {
      const auto q = static_cast<double>(measure_queue(sim, a));
      log.queues(k, static_cast<Eigen::Index>(a)) = q;
      log.rewards(k, static_cast<Eigen::Index>(a)) = local_reward<double>(q, hp.reward_norm);
    }
  }

  if (mode == Mode::train) {
    push_transitions(observe_all(model, sim, fingerprints), steps - 1);
    // The episode is over: nothing to bootstrap from.
    if (!buffers[0].empty()) update_round(std::vector<double>(n, 0.0));
  }

  finish_log(log, sim);
  return log;
}

FixedTimeController::FixedTimeController(const NetworkSpec& spec, double cycle) : cycle_(cycle) {
  if (!(cycle > 0.0)) throw InvalidArgument("fixed-time cycle must be > 0");
  for (std::size_t a = 0; a < spec.num_agents(); ++a) phases_.push_back(spec.num_phases(a));
}

std::size_t FixedTimeController::phase_at(std::size_t agent, double t) const {
  const auto slot = static_cast<long>(std::floor(t / cycle_ + 1e-9));
  return static_cast<std::size_t>(slot % static_cast<long>(phases_.at(agent)));
}

FixedTimeController fixed_time_baseline(const NetworkSpec& spec, double cycle) {
  return FixedTimeController(spec, cycle);
}

EpisodeLog run_fixed_time_episode(std::shared_ptr<const NetworkSpec> spec, const InsertionSchedule& schedule,
                                  const TrainConfig& config, const FixedTimeController& controller,
                                  const EpisodeOptions& options) {
  const HyperParams& hp = config.hp;
  const int steps = hp.steps_per_episode();
  SimState sim = init_sim(std::move(spec), schedule, config.emissions, config.sim);
  const std::size_t n = sim.signals.size();
  EpisodeLog log;
  start_log(log, steps, n);
  if (options.record_trace) {
    log.trace.emplace();
    log.trace->reserve(static_cast<std::size_t>(hp.episode_seconds), sim);
  }
  for (int k = 0; k < steps; ++k) {
    for (int tick = 0; tick < hp.delta_t; ++tick) {
      for (std::size_t a = 0; a < n; ++a) {
        const std::size_t phase = controller.phase_at(a, sim.clock);
        apply_action(sim, a, phase);
        if (tick == 0) log.actions(k, static_cast<Eigen::Index>(a)) = static_cast<int>(phase);
      }
      advance(sim, 1, log);
    }
    for (std::size_t a = 0; a < n; ++a) {
      const auto q = static_cast<double>(measure_queue(sim, a));
      log.queues(k, static_cast<Eigen::Index>(a)) = q;
      log.rewards(k, static_cast<Eigen::Index>(a)) = local_reward<double>(q, hp.reward_norm);
    }
  }
  finish_log(log, sim);
  return log;
}

InsertionSchedule episode_schedule(const NetworkSpec& spec, const TrainConfig& config, std::uint64_t seed) {
  return make_schedule(spec, config.hp.n_vehicles, config.insertion_window, seed);
}

void write_curve_csv(const std::vector<CurveRow>& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "episode,steps,mean_reward,mean_queue\n";
  for (const CurveRow& r : curve) out << fmt::format("{},{},{:.9g},{:.9g}\n", r.episode, r.steps, r.mean_reward, r.mean_queue);
}

namespace {

constexpr std::uint64_t kEvalStream = 0x5eedULL;

CurveRow summarize(const EpisodeLog& log, int episode, long steps) {
  CurveRow row;
  row.episode = episode;
  row.steps = steps;
  const double cells = static_cast<double>(log.rewards.size());
  row.mean_reward = log.cumulative_reward / cells;
  row.mean_queue = log.cumulative_queue / cells;
  return row;
}

}  // namespace

TrainResult train(Ma2cModel& model, const TrainConfig& config, const std::filesystem::path& out_dir,
                  const std::function<void(const CurveRow&)>& progress) {
  config.validate();
  const int per_episode = config.steps_per_episode();
  const long episodes = (config.total_training_steps + per_episode - 1) / per_episode;
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  TrainResult result;
  long steps = 0;
  for (long e = 0; e < episodes; ++e) {
    const std::uint64_t episode_seed = mix_seed(config.seed, static_cast<std::uint64_t>(e) + 1000);
    const auto schedule = episode_schedule(*model.spec, config, episode_seed);
    const EpisodeLog log = run_episode(model, schedule, config, Mode::train, episode_seed);
    steps += per_episode;

    const CurveRow row = summarize(log, static_cast<int>(e), steps);
    result.curve.push_back(row);
    if (progress) progress(row);

    if (config.eval_every > 0 && (e + 1) % config.eval_every == 0) {
      const std::uint64_t eval_seed = mix_seed(config.seed, kEvalStream);
      const EpisodeLog eval = run_episode(model, episode_schedule(*model.spec, config, eval_seed), config, Mode::eval,
                                          eval_seed);
      result.eval_curve.push_back(summarize(eval, static_cast<int>(e), steps));
    }

    if (!out_dir.empty() && config.checkpoint_every > 0 && (e + 1) % config.checkpoint_every == 0 &&
        e + 1 < episodes) {
      const auto path = out_dir / fmt::format("checkpoint_{:06d}.ckpt", steps);
      save_checkpoint(path, model, config, steps);
      result.checkpoints.push_back(path);
    }
  }
  if (!out_dir.empty()) {
    const auto path = out_dir / "final.ckpt";
    save_checkpoint(path, model, config, steps);
    result.checkpoints.push_back(path);
    write_curve_csv(result.curve, out_dir / "training_curve.csv");
    if (!result.eval_curve.empty()) write_curve_csv(result.eval_curve, out_dir / "eval_curve.csv");
  }
  return result;
}

}  // namespace ma2c
