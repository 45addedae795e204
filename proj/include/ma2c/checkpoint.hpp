#ifndef MA2C_CHECKPOINT_HPP
#define MA2C_CHECKPOINT_HPP

#include <filesystem>

#include "ma2c/config.hpp"
#include "ma2c/trainer.hpp"

namespace ma2c {

/// Binary checkpoint, format version 1 (little-endian):
///   magic "MA2CCKPT", u32 version,
///   string network_json, string config_json, u64 steps_done,
///   u32 agents, then per agent: u64 seed, net(actor), net(critic)
/// where net = i32 x 7 shape fields, params, RMSprop accumulator
/// (each a u64 count followed by raw IEEE-754 doubles) and strings are
/// u64 length + bytes. Loading restores every bit.
void save_checkpoint(const std::filesystem::path& path, const Ma2cModel& model, const TrainConfig& config,
                     long steps_done = 0);

struct Checkpoint {
  Ma2cModel model;
  TrainConfig config;
  long steps_done = 0;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ma2c

#endif  // MA2C_CHECKPOINT_HPP
