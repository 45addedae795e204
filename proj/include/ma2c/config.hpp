#ifndef MA2C_CONFIG_HPP
#define MA2C_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "ma2c/emission.hpp"
#include "ma2c/marl.hpp"
#include "ma2c/microsim.hpp"
#include "ma2c/nn/recurrent_net.hpp"

namespace ma2c {

struct TrainConfig {
  HyperParams hp;
  SimConfig sim;
  EmissionCoefficients emissions = EmissionCoefficients::defaults();
  nn::NetWidths widths;

  long total_training_steps = 50000;  // agent-interaction steps
  int checkpoint_every = 0;           // episodes; 0 writes only the final checkpoint
  int eval_every = 0;                 // episodes; 0 disables periodic evaluation
  std::uint64_t seed = 1;
  double insertion_window = 2000.0;   // s; vehicles enter during [0, window)
  double baseline_cycle = 20.0;       // s per phase for the fixed-time comparator

  int steps_per_episode() const { return hp.steps_per_episode(); }
  /// Throws ValidationError on inconsistent settings.
  void validate() const;
};

/// Reads a config document; missing keys keep their defaults. `base_dir`
/// resolves a relative `emissions_file` entry.
TrainConfig parse_train_config(const std::string& text, const std::filesystem::path& base_dir = {});
TrainConfig load_train_config(const std::filesystem::path& path);
std::string train_config_to_json(const TrainConfig& config);

HyperParams parse_hyperparams(const std::string& text);
std::string hyperparams_to_json(const HyperParams& hp);

}  // namespace ma2c

#endif  // MA2C_CONFIG_HPP
