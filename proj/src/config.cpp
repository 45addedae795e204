#include "ma2c/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ma2c/error.hpp"

namespace ma2c {

using nlohmann::json;

void HyperParams::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("hyperparams: " + what); };
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma must lie in [0, 1)");
  if (beta < 0.0 || xi_critic < 0.0) fail("beta and xi_critic must be >= 0");
  if (!(eta_actor > 0.0 && eta_critic > 0.0)) fail("learning rates must be > 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (delta_t < 1 || episode_seconds < delta_t) fail("delta_t must be >= 1 and <= episode_seconds");
  if (episode_seconds % delta_t != 0) fail("episode_seconds must be a multiple of delta_t");
  if (t_yellow < 0.0 || t_yellow >= delta_t) fail("t_yellow must lie in [0, delta_t)");
  if (n_vehicles < 0) fail("n_vehicles must be >= 0");
  if (!(wave_norm > 0.0 && reward_norm > 0.0)) fail("normalizers must be > 0");
  if (!(grad_clip > 0.0)) fail("grad_clip must be > 0");
  if (!(rms_decay > 0.0 && rms_decay < 1.0) || !(rms_epsilon > 0.0)) fail("bad RMSprop constants");
}

void TrainConfig::validate() const {
  hp.validate();
  emissions.validate();
  if (total_training_steps < 1) throw ValidationError("config: total_training_steps must be >= 1");
  if (checkpoint_every < 0 || eval_every < 0) throw ValidationError("config: negative period");
  if (!(insertion_window > 0.0)) throw ValidationError("config: insertion_window must be > 0");
  if (!(baseline_cycle > hp.t_yellow)) throw ValidationError("config: baseline_cycle must exceed the yellow time");
  if (static_cast<long>(steps_per_episode()) * hp.delta_t != hp.episode_seconds)
    throw ValidationError("config: steps_per_episode x delta_t must equal episode_seconds");
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

json hp_json(const HyperParams& hp) {
  return {{"alpha", hp.alpha},
          {"gamma", hp.gamma},
          {"beta", hp.beta},
          {"xi_critic", hp.xi_critic},
          {"eta_actor", hp.eta_actor},
          {"eta_critic", hp.eta_critic},
          {"batch_size", hp.batch_size},
          {"delta_t", hp.delta_t},
          {"t_yellow", hp.t_yellow},
          {"episode_seconds", hp.episode_seconds},
          {"n_vehicles", hp.n_vehicles},
          {"wave_norm", hp.wave_norm},
          {"reward_norm", hp.reward_norm},
          {"grad_clip", hp.grad_clip},
          {"rms_decay", hp.rms_decay},
          {"rms_epsilon", hp.rms_epsilon}};
}

HyperParams hp_from(const json& j) {
  HyperParams hp;
  read(j, "alpha", hp.alpha);
  read(j, "gamma", hp.gamma);
  read(j, "beta", hp.beta);
  read(j, "xi_critic", hp.xi_critic);
  read(j, "eta_actor", hp.eta_actor);
  read(j, "eta_critic", hp.eta_critic);
  read(j, "batch_size", hp.batch_size);
  read(j, "delta_t", hp.delta_t);
  read(j, "t_yellow", hp.t_yellow);
  read(j, "episode_seconds", hp.episode_seconds);
  read(j, "n_vehicles", hp.n_vehicles);
  read(j, "wave_norm", hp.wave_norm);
  read(j, "reward_norm", hp.reward_norm);
  read(j, "grad_clip", hp.grad_clip);
  read(j, "rms_decay", hp.rms_decay);
  read(j, "rms_epsilon", hp.rms_epsilon);
  return hp;
}

json parse_doc(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

HyperParams parse_hyperparams(const std::string& text) {
  HyperParams hp = hp_from(parse_doc(text, "hyperparams"));
  hp.validate();
  return hp;
}

std::string hyperparams_to_json(const HyperParams& hp) { return hp_json(hp).dump(2); }

TrainConfig parse_train_config(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = parse_doc(text, "config");
  TrainConfig c;
  if (doc.contains("hyperparams")) c.hp = hp_from(doc.at("hyperparams"));
  if (doc.contains("sim")) {
    const json& s = doc.at("sim");
    read(s, "saturation_rate", c.sim.saturation_rate);
    read(s, "vehicle_gap", c.sim.vehicle_gap);
    read(s, "accel_duration", c.sim.accel_duration);
    if (s.contains("intervals")) {
      c.sim.intervals.clear();
      for (const auto& iv : s.at("intervals")) c.sim.intervals.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
    }
  }
  c.sim.yellow_time = c.hp.t_yellow;
  if (doc.contains("emissions")) {
    c.emissions = parse_emission_coefficients(doc.at("emissions").dump());
  } else if (doc.contains("emissions_file")) {
    std::filesystem::path p = doc.at("emissions_file").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    c.emissions = load_emission_coefficients(p);
  }
  if (doc.contains("net")) {
    read(doc.at("net"), "fc_units", c.widths.fc_units);
    read(doc.at("net"), "lstm_units", c.widths.lstm_units);
  }
  read(doc, "total_training_steps", c.total_training_steps);
  read(doc, "checkpoint_every", c.checkpoint_every);
  read(doc, "eval_every", c.eval_every);
  read(doc, "seed", c.seed);
  read(doc, "insertion_window", c.insertion_window);
  read(doc, "baseline_cycle", c.baseline_cycle);
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_train_config(buffer.str(), path.parent_path());
}

std::string train_config_to_json(const TrainConfig& c) {
  json intervals = json::array();
  for (const auto& [a, b] : c.sim.intervals) intervals.push_back({a, b});
  json doc = {{"hyperparams", hp_json(c.hp)},
              {"sim",
               {{"saturation_rate", c.sim.saturation_rate},
                {"vehicle_gap", c.sim.vehicle_gap},
                {"accel_duration", c.sim.accel_duration},
                {"intervals", intervals}}},
              {"emissions", json::parse(emission_coefficients_to_json(c.emissions))},
              {"net", {{"fc_units", c.widths.fc_units}, {"lstm_units", c.widths.lstm_units}}},
              {"total_training_steps", c.total_training_steps},
              {"checkpoint_every", c.checkpoint_every},
              {"eval_every", c.eval_every},
              {"seed", c.seed},
              {"insertion_window", c.insertion_window},
              {"baseline_cycle", c.baseline_cycle}};
  return doc.dump(2);
}

}  // namespace ma2c
