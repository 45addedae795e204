#ifndef MA2C_TESTS_A2C_ORACLE_HPP
#define MA2C_TESTS_A2C_ORACLE_HPP

// A single-agent advantage actor-critic update written out step by step,
// plus random experience generators shared by the trainer tests and the
// acceptance checks.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "ma2c/marl.hpp"
#include "ma2c/trainer.hpp"
#include "oracles.hpp"

namespace ma2c::oracle {

/// Random observations for every agent of `model`, assembled the way the
/// trainer does, then `T` tuples per agent with random actions and rewards.
/// The stored value is the critic's own output along the replayed sequence.
inline std::vector<ExperienceBuffer> random_buffers(const Ma2cModel& model, int T, std::mt19937_64& rng) {
  const std::size_t n = model.nets.size();
  std::uniform_real_distribution<double> wave(0.0, 15.0), reward(-2.0, 2.0), unit(0.0, 1.0);
  std::vector<ExperienceBuffer> buffers(n);
  std::vector<nn::LstmState<double>> critic(n);
  for (std::size_t a = 0; a < n; ++a) {
    buffers[a].actor_start = model.nets[a].actor.zero_state();
    buffers[a].critic_start = model.nets[a].critic.zero_state();
    critic[a] = buffers[a].critic_start;
  }
  auto observe = [&](std::vector<Eigen::VectorXd>& fps) {
    std::vector<Eigen::VectorXd> waves(n);
    for (std::size_t a = 0; a < n; ++a)
      waves[a] = Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(model.spec->agent_lanes(a).size()),
                                              [&] { return wave(rng); });
    std::vector<Observation<double>> obs;
    for (std::size_t a = 0; a < n; ++a)
      obs.push_back(assemble_observation<double>(waves, fps, a, model.neighbors[a], model.hp.alpha,
                                                 model.hp.wave_norm));
    for (std::size_t a = 0; a < n; ++a) {
      fps[a] = Eigen::VectorXd::NullaryExpr(model.nets[a].num_actions(), [&] { return unit(rng) + 0.05; });
      fps[a] /= fps[a].sum();
    }
    return obs;
  };
  std::vector<Eigen::VectorXd> fps(n);
  for (std::size_t a = 0; a < n; ++a)
    fps[a] = Eigen::VectorXd::Constant(model.nets[a].num_actions(), 1.0 / model.nets[a].num_actions());
  auto obs = observe(fps);
  for (int t = 0; t < T; ++t) {
    auto next = observe(fps);
    std::vector<double> r(n);
    for (double& x : r) x = reward(rng);
    for (std::size_t a = 0; a < n; ++a) {
      Transition tr;
      tr.obs = obs[a];
      tr.next_obs = next[a];
      tr.action = std::uniform_int_distribution<std::size_t>(0, model.nets[a].num_actions() - 1)(rng);
      tr.reward = r[a];
      for (std::size_t j : model.neighbors[a]) tr.neighbor_rewards.push_back(r[j]);
      tr.value = model.nets[a].critic.forward(tr.obs.wave_input(), tr.obs.fingerprint_input(), critic[a]).output(0);
      buffers[a].tuples.push_back(std::move(tr));
    }
    obs = std::move(next);
  }
  return buffers;
}

/// Vanilla A2C for one agent with no neighbors:
///   R_t = r_t + gamma R_{t+1},  A_t = R_t - V_t,
///   actor loss  -sum_t A_t log pi(u_t) - beta sum_t H(pi_t),
///   critic loss xi/2 sum_t (R_t - V_t)^2,
/// gradients clipped to norm `grad_clip`, then one RMSprop step each.
inline void vanilla_a2c_update(AgentNet& net, const ExperienceBuffer& buffer, double bootstrap, const HyperParams& hp) {
  const std::size_t T = buffer.size();
  std::vector<double> rewards(T), frozen(T);
  for (std::size_t t = 0; t < T; ++t) {
    rewards[t] = buffer.tuples[t].reward;
    frozen[t] = buffer.tuples[t].value;
  }
  const std::vector<double> R = oracle::n_step_returns(rewards, bootstrap, hp.gamma);

  std::vector<nn::StepCache<double>> ac, cc;
  nn::LstmState<double> hs = buffer.actor_start, cs = buffer.critic_start;
  for (const Transition& tr : buffer.tuples) {
    ac.push_back(net.actor.forward(tr.obs.wave_input(), tr.obs.fingerprint_input(), hs));
    cc.push_back(net.critic.forward(tr.obs.wave_input(), tr.obs.fingerprint_input(), cs));
  }

  std::vector<Eigen::VectorXd> dlogits(T), dvalue(T);
  for (std::size_t t = 0; t < T; ++t) {
    const Eigen::VectorXd& pi = ac[t].policy;
    const double A = R[t] - frozen[t];
    double plogp = 0.0;
    for (Eigen::Index k = 0; k < pi.size(); ++k) plogp += pi(k) * std::log(pi(k));
    Eigen::VectorXd g(pi.size());
    for (Eigen::Index k = 0; k < pi.size(); ++k) {
      const double onehot = k == static_cast<Eigen::Index>(buffer.tuples[t].action) ? 1.0 : 0.0;
      g(k) = -A * (onehot - pi(k)) + hp.beta * pi(k) * (std::log(pi(k)) - plogp);
    }
    dlogits[t] = g;
    dvalue[t] = Eigen::VectorXd::Constant(1, hp.xi_critic * (cc[t].output(0) - R[t]));
  }
  Eigen::VectorXd ga = net.actor.backward(ac, dlogits);
  Eigen::VectorXd gc = net.critic.backward(cc, dvalue);

  auto clip_and_step = [&](Eigen::VectorXd& g, Eigen::VectorXd& w, Eigen::VectorXd& acc, double lr) {
    double sq = 0.0;
    for (Eigen::Index k = 0; k < g.size(); ++k) sq += g(k) * g(k);
    const double norm = std::sqrt(sq);
    if (norm > hp.grad_clip)
      for (Eigen::Index k = 0; k < g.size(); ++k) g(k) *= hp.grad_clip / norm;
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      acc(k) = hp.rms_decay * acc(k) + (1.0 - hp.rms_decay) * g(k) * g(k);
      w(k) -= lr * g(k) / std::sqrt(acc(k) + hp.rms_epsilon);
    }
  };
  clip_and_step(ga, net.actor.params(), net.actor_opt.accumulator(), hp.eta_actor);
  clip_and_step(gc, net.critic.params(), net.critic_opt.accumulator(), hp.eta_critic);
}

inline double max_param_diff(const std::vector<AgentNet>& a, const std::vector<AgentNet>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, (a[k].actor.params() - b[k].actor.params()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a[k].critic.params() - b[k].critic.params()).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace ma2c::oracle

#endif  // MA2C_TESTS_A2C_ORACLE_HPP
