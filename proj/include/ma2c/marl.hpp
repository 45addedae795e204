#ifndef MA2C_MARL_HPP
#define MA2C_MARL_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ma2c/error.hpp"

namespace ma2c {

/// Learning hyperparameters. Defaults reproduce the reference setting.
struct HyperParams {
  double alpha = 0.9;          // spatial discount
  double gamma = 0.99;         // temporal discount
  double beta = 0.01;          // entropy weight
  double xi_critic = 0.5;      // critic loss weight
  double eta_actor = 5e-4;     // actor learning rate
  double eta_critic = 2.5e-4;  // critic learning rate
  int batch_size = 40;         // |B|, also the n of the n-step return
  int delta_t = 5;             // s between agent interactions
  double t_yellow = 2.0;       // s
  int episode_seconds = 3600;  // T_s
  int n_vehicles = 2000;       // N_v

  double wave_norm = 5.0;     // veh per lane
  double reward_norm = 20.0;  // veh
  double grad_clip = 40.0;    // global l2 norm per parameter set
  double rms_decay = 0.99;
  double rms_epsilon = 1e-5;

  /// Throws ValidationError when a value is out of range.
  void validate() const;
  int steps_per_episode() const { return episode_seconds / delta_t; }

  bool operator==(const HyperParams&) const = default;
};

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// What agent i sees at one interaction step.
///
/// `neighbor_waves` are already alpha-scaled; `fingerprints` are the
/// neighbors' previous-step policies, passed through untouched. Neighbors
/// appear in ascending agent index.
template <typename Scalar = double>
struct Observation {
  Vec<Scalar> own_wave;
  std::vector<Vec<Scalar>> neighbor_waves;
  std::vector<Vec<Scalar>> fingerprints;

  /// own wave followed by every neighbor wave
  Vec<Scalar> wave_input() const {
    Eigen::Index n = own_wave.size();
    for (const auto& w : neighbor_waves) n += w.size();
    Vec<Scalar> out(n);
    Eigen::Index at = 0;
    out.segment(at, own_wave.size()) = own_wave;
    at += own_wave.size();
    for (const auto& w : neighbor_waves) {
      out.segment(at, w.size()) = w;
      at += w.size();
    }
    return out;
  }

  Vec<Scalar> fingerprint_input() const {
    Eigen::Index n = 0;
    for (const auto& f : fingerprints) n += f.size();
    Vec<Scalar> out(n);
    Eigen::Index at = 0;
    for (const auto& f : fingerprints) {
      out.segment(at, f.size()) = f;
      at += f.size();
    }
    return out;
  }
};

template <typename Scalar>
Vec<Scalar> clip(const Vec<Scalar>& v, Scalar lo, Scalar hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

template <typename Scalar>
Scalar clip(Scalar x, Scalar lo, Scalar hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

inline constexpr double kStateClip = 2.0;
inline constexpr double kRewardClip = 2.0;

template <typename Scalar>
bool is_distribution(const Vec<Scalar>& p, Scalar tol = Scalar(1e-6)) {
  return p.size() > 0 && (p.array() >= Scalar(0)).all() && std::abs(p.sum() - Scalar(1)) <= tol;
}

/// Builds agent `agent`'s observation from raw per-agent waves and the
/// previous-step policies of every agent.
template <typename Scalar>
Observation<Scalar> assemble_observation(std::span<const Vec<Scalar>> waves,
                                         std::span<const Vec<Scalar>> fingerprints, std::size_t agent,
                                         std::span<const std::size_t> neighbors, Scalar alpha, Scalar norm) {
  if (!(norm > Scalar(0))) throw InvalidArgument("assemble_observation: norm must be > 0");
  if (agent >= waves.size()) throw InvalidArgument("assemble_observation: missing wave for agent");
  const Scalar lo(0), hi(kStateClip);
  Observation<Scalar> obs;
  obs.own_wave = clip<Scalar>(waves[agent] / norm, lo, hi);
  for (std::size_t j : neighbors) {
    if (j >= waves.size() || j >= fingerprints.size())
      throw InvalidArgument("assemble_observation: missing data for neighbor " + std::to_string(j));
    if (!is_distribution<Scalar>(fingerprints[j]))
      throw InvalidArgument("assemble_observation: fingerprint of agent " + std::to_string(j) +
                            " is not a distribution");
    obs.neighbor_waves.push_back(alpha * clip<Scalar>(waves[j] / norm, lo, hi));
    obs.fingerprints.push_back(fingerprints[j]);
  }
  return obs;
}

/// Learning reward: negated queue sum, normalized and clipped to [-2, 2].
template <typename Scalar>
Scalar local_reward(Scalar queue_sum, Scalar norm) {
  if (queue_sum < Scalar(0) || !(norm > Scalar(0))) throw InvalidArgument("local_reward: bad arguments");
  return clip<Scalar>(-queue_sum / norm, Scalar(-kRewardClip), Scalar(kRewardClip));
}

/// (r_i + alpha * sum_j r_j) / (|N_i| + 1)
template <typename Scalar>
Scalar spatial_discount(Scalar own_reward, std::span<const Scalar> neighbor_rewards, Scalar alpha) {
  Scalar sum(0);
  for (Scalar r : neighbor_rewards) sum += r;
  return (own_reward + alpha * sum) / static_cast<Scalar>(neighbor_rewards.size() + 1);
}

/// R_t = sum_{tau=t}^{T-1} gamma^{tau-t} r_tau + gamma^{T-t} bootstrap, via the backward recursion.
template <typename Scalar>
Vec<Scalar> n_step_returns(const Vec<Scalar>& rewards, Scalar bootstrap, Scalar gamma) {
  if (rewards.size() == 0) throw InvalidArgument("n_step_returns: empty reward sequence");
  Vec<Scalar> returns(rewards.size());
  Scalar running = bootstrap;
  for (Eigen::Index t = rewards.size() - 1; t >= 0; --t) {
    running = rewards(t) + gamma * running;
    returns(t) = running;
  }
  return returns;
}

template <typename Scalar>
Vec<Scalar> advantage(const Vec<Scalar>& returns, const Vec<Scalar>& values) {
  if (returns.size() != values.size()) throw InvalidArgument("advantage: length mismatch");
  return returns - values;
}

/// sum_u p log p, with 0 log 0 = 0. This is the negative entropy.
template <typename Scalar>
Scalar neg_entropy(const Vec<Scalar>& p) {
  Scalar s(0);
  for (Eigen::Index u = 0; u < p.size(); ++u)
    if (p(u) > Scalar(0)) s += p(u) * std::log(p(u));
  return s;
}

/// Minimization form of the actor objective:
///   -sum_t log pi(u_t) A_t + beta * sum_t sum_u pi log pi
/// Descending it ascends the advantage-weighted log-likelihood and raises
/// policy entropy. `policies` holds one distribution per column.
template <typename Scalar>
Scalar actor_loss(const Vec<Scalar>& log_probs, const Vec<Scalar>& advantages, const Mat<Scalar>& policies,
                  Scalar beta) {
  if (log_probs.size() != advantages.size() || policies.cols() != log_probs.size())
    throw InvalidArgument("actor_loss: length mismatch");
  Scalar pg(0), ent(0);
  for (Eigen::Index t = 0; t < log_probs.size(); ++t) {
    Vec<Scalar> p = policies.col(t);
    if (!is_distribution<Scalar>(p)) throw InvalidArgument("actor_loss: policy column is not normalized");
    pg += log_probs(t) * advantages(t);
    ent += neg_entropy<Scalar>(p);
  }
  return -pg + beta * ent;
}

/// 1/2 sum_t (R_t - V_t)^2
template <typename Scalar>
Scalar critic_loss(const Vec<Scalar>& returns, const Vec<Scalar>& values) {
  if (returns.size() != values.size()) throw InvalidArgument("critic_loss: length mismatch");
  return Scalar(0.5) * (returns - values).squaredNorm();
}

template <typename Scalar>
Scalar total_loss(Scalar actor, Scalar critic, Scalar xi) {
  return actor + xi * critic;
}

/// d(actor_loss)/d(logits) for one step, advantage held constant.
template <typename Scalar>
Vec<Scalar> actor_logit_gradient(const Vec<Scalar>& policy, std::size_t action, Scalar adv, Scalar beta) {
  Vec<Scalar> g = adv * policy;
  g(static_cast<Eigen::Index>(action)) -= adv;
  const Vec<Scalar> logp = policy.array().log().matrix();
  const Scalar mean_logp = policy.dot(logp);
  g += beta * (policy.array() * (logp.array() - mean_logp)).matrix();
  return g;
}

/// d(xi * critic_loss)/d(value) for one step.
template <typename Scalar>
Scalar critic_value_gradient(Scalar ret, Scalar value, Scalar xi) {
  return xi * (value - ret);
}

}  // namespace ma2c

#endif  // MA2C_MARL_HPP
