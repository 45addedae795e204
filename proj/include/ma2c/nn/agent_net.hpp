#ifndef MA2C_NN_AGENT_NET_HPP
#define MA2C_NN_AGENT_NET_HPP

#include <cstdint>
#include <random>

#include "ma2c/marl.hpp"
#include "ma2c/nn/optim.hpp"
#include "ma2c/nn/recurrent_net.hpp"

namespace ma2c::nn {

/// Actor (theta) and critic (psi) of one agent, their RMSprop state, and
/// the recurrent state carried between interaction steps.
template <typename Scalar>
struct AgentNet {
  RecurrentNet<Scalar> actor;
  RecurrentNet<Scalar> critic;
  RmsProp<Scalar> actor_opt;
  RmsProp<Scalar> critic_opt;
  LstmState<Scalar> actor_state;
  LstmState<Scalar> critic_state;
  std::uint64_t seed = 0;

  int num_actions() const { return actor.shape().outputs; }
  void reset_state() {
    actor_state = actor.zero_state();
    critic_state = critic.zero_state();
  }
};

template <typename Scalar>
AgentNet<Scalar> init_params(int wave_dim, int fp_dim, int n_actions, std::uint64_t seed, NetWidths widths = {},
                             Scalar rms_decay = Scalar(0.99), Scalar rms_epsilon = Scalar(1e-5), double gain = 1.0) {
  if (n_actions < 1) throw InvalidArgument("init_params: need at least one action");
  AgentNet<Scalar> net;
  net.seed = seed;
  net.actor = RecurrentNet<Scalar>(make_shape(wave_dim, fp_dim, n_actions, true, widths));
  net.critic = RecurrentNet<Scalar>(make_shape(wave_dim, fp_dim, 1, false, widths));
  std::mt19937_64 rng(seed);
  net.actor.initialize(rng, gain);
  net.critic.initialize(rng, gain);
  net.actor_opt = RmsProp<Scalar>(net.actor.num_params(), rms_decay, rms_epsilon);
  net.critic_opt = RmsProp<Scalar>(net.critic.num_params(), rms_decay, rms_epsilon);
  net.reset_state();
  return net;
}

template <typename Scalar>
struct AgentOutput {
  Vec<Scalar> policy;
  Scalar value;
};

/// One interaction step: policy and value, both hidden states advanced.
template <typename Scalar>
AgentOutput<Scalar> forward(AgentNet<Scalar>& net, const Observation<Scalar>& obs) {
  const Vec<Scalar> xw = obs.wave_input(), xf = obs.fingerprint_input();
  auto a = net.actor.forward(xw, xf, net.actor_state);
  auto c = net.critic.forward(xw, xf, net.critic_state);
  return {std::move(a.policy), c.output(0)};
}

/// Critic value of `obs` without committing the critic's hidden state.
template <typename Scalar>
Scalar peek_value(const AgentNet<Scalar>& net, const Observation<Scalar>& obs) {
  LstmState<Scalar> scratch = net.critic_state;
  return net.critic.forward(obs.wave_input(), obs.fingerprint_input(), scratch).output(0);
}

}  // namespace ma2c::nn

#endif  // MA2C_NN_AGENT_NET_HPP
