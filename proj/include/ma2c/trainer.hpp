#ifndef MA2C_TRAINER_HPP
#define MA2C_TRAINER_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "ma2c/config.hpp"
#include "ma2c/marl.hpp"
#include "ma2c/microsim.hpp"
#include "ma2c/network.hpp"
#include "ma2c/nn/agent_net.hpp"
#include "ma2c/trace.hpp"

namespace ma2c {

using AgentNet = nn::AgentNet<double>;

/// One (s_t, u_t, s_{t+1}, r_t) tuple plus what the update needs from collection time.
struct Transition {
  Observation<double> obs;
  std::size_t action = 0;
  Observation<double> next_obs;
  double reward = 0.0;                  // clipped local reward r_{t,i}
  std::vector<double> neighbor_rewards; // r_{t,j}, j in N_i ascending
  double value = 0.0;                   // frozen critic value V(s_t)
};

/// Time-contiguous experience of one agent since its last update.
struct ExperienceBuffer {
  nn::LstmState<double> actor_start;   // recurrent state before the first tuple
  nn::LstmState<double> critic_start;
  std::vector<Transition> tuples;

  std::size_t size() const { return tuples.size(); }
  bool empty() const { return tuples.empty(); }
  void restart(const AgentNet& net) {
    tuples.clear();
    actor_start = net.actor_state;
    critic_start = net.critic_state;
  }
};

/// The learners of every agent plus the wiring that sizes their inputs.
struct Ma2cModel {
  std::shared_ptr<const NetworkSpec> spec;
  NeighborGraph neighbors;
  HyperParams hp;
  std::vector<AgentNet> nets;
};

Ma2cModel make_model(std::shared_ptr<const NetworkSpec> spec, const TrainConfig& config);

struct UpdateStats {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double actor_grad_norm = 0.0;   // before clipping
  double critic_grad_norm = 0.0;
  double mean_return = 0.0;
  double mean_value = 0.0;
  double mean_entropy = 0.0;
};

/// Gradients of the batch losses for one agent, before clipping.
struct AgentGradients {
  Eigen::VectorXd actor;
  Eigen::VectorXd critic;
  UpdateStats stats;
};

/// Replays the buffer through the current parameters and returns the
/// gradients of the actor loss and of xi * critic loss.
AgentGradients compute_gradients(const AgentNet& net, const ExperienceBuffer& buffer, double bootstrap,
                                 const HyperParams& hp);

/// Clip, then RMSprop step for one agent.
UpdateStats update_agent(AgentNet& net, const ExperienceBuffer& buffer, double bootstrap, const HyperParams& hp);

/// Updates every agent from its own buffer, visiting agents in `order`
/// (identity when empty). Buffers are left untouched.
std::vector<UpdateStats> update_agents(std::vector<AgentNet>& nets, const std::vector<ExperienceBuffer>& buffers,
                                       const std::vector<double>& bootstraps, const HyperParams& hp,
                                       std::vector<std::size_t> order = {});

enum class Mode { train, eval };

struct EpisodeLog {
  Eigen::MatrixXd rewards;    // rows: interaction steps, cols: agents (clipped local reward)
  Eigen::MatrixXd queues;     // queue sums measured at the end of each step's window
  Eigen::MatrixXi actions;
  Eigen::MatrixXd entropies;  // policy entropy (zero for the fixed-time controller)
  double cumulative_reward = 0.0;
  double cumulative_queue = 0.0;  // sum over steps and agents
  long final_running = 0;
  long inserted = 0;
  long exited = 0;
  long deferred = 0;
  int update_rounds = 0;
  double cleared_at = -1.0;  // first time every scheduled vehicle has left, or -1
  EmissionLedger ledger;
  std::optional<EpisodeTrace> trace;
};

struct EpisodeOptions {
  bool record_trace = false;
  /// Called after every update round (train mode) with the per-agent stats.
  std::function<void(const std::vector<UpdateStats>&)> on_update;
};

/// Simulates one episode of `hp.episode_seconds` ticks with MA2C control.
EpisodeLog run_episode(Ma2cModel& model, const InsertionSchedule& schedule, const TrainConfig& config, Mode mode,
                       std::uint64_t seed, const EpisodeOptions& options = {});

/// Round-robin phase cycling, `cycle` seconds per phase, independent of traffic.
class FixedTimeController {
 public:
  FixedTimeController(const NetworkSpec& spec, double cycle);
  std::size_t phase_at(std::size_t agent, double t) const;
  double cycle() const { return cycle_; }

 private:
  std::vector<std::size_t> phases_;
  double cycle_;
};

FixedTimeController fixed_time_baseline(const NetworkSpec& spec, double cycle);

EpisodeLog run_fixed_time_episode(std::shared_ptr<const NetworkSpec> spec, const InsertionSchedule& schedule,
                                  const TrainConfig& config, const FixedTimeController& controller,
                                  const EpisodeOptions& options = {});

struct CurveRow {
  int episode = 0;
  long steps = 0;
  double mean_reward = 0.0;  // per agent per step
  double mean_queue = 0.0;
};

struct TrainResult {
  std::vector<CurveRow> curve;
  std::vector<CurveRow> eval_curve;  // greedy episodes every `eval_every` training episodes
  std::vector<std::filesystem::path> checkpoints;
};

/// Schedule used for training episode `episode` (and eval seed `episode`).
InsertionSchedule episode_schedule(const NetworkSpec& spec, const TrainConfig& config, std::uint64_t seed);

/// Runs episodes until `total_training_steps` interactions are consumed.
/// With an empty `out_dir` nothing is written; otherwise the directory gets
/// final.ckpt, training_curve.csv and, if enabled, periodic checkpoints and
/// eval_curve.csv.
TrainResult train(Ma2cModel& model, const TrainConfig& config, const std::filesystem::path& out_dir = {},
                  const std::function<void(const CurveRow&)>& progress = {});

void write_curve_csv(const std::vector<CurveRow>& curve, const std::filesystem::path& path);

}  // namespace ma2c

#endif  // MA2C_TRAINER_HPP
