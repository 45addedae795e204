#include "ma2c/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "ma2c/error.hpp"

namespace ma2c {

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'A', '2', 'C', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(sizeof(double) == 8, "checkpoint format assumes IEEE-754 binary64");

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write checkpoint '" + path.string() + "'");
  }
  template <typename T>
  void pod(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void vec(const Eigen::VectorXd& v) {
    pod<std::uint64_t>(static_cast<std::uint64_t>(v.size()));
    out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("checkpoint write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw ParseError("cannot open checkpoint '" + path.string() + "'");
  }
  template <typename T>
  T pod() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    check();
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    if (n > (1ULL << 32)) throw ParseError("checkpoint: implausible string length");
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    check();
    return s;
  }
  Eigen::VectorXd vec(Eigen::Index expected) {
    const auto n = pod<std::uint64_t>();
    if (static_cast<Eigen::Index>(n) != expected) throw ParseError("checkpoint: parameter count mismatch");
    Eigen::VectorXd v(expected);
    in_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    check();
    return v;
  }
  void raw(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    check();
  }

 private:
  void check() {
    if (!in_) throw ParseError("checkpoint: truncated file");
  }
  std::ifstream in_;
};

void write_net(Writer& w, const nn::RecurrentNet<double>& net, const nn::RmsProp<double>& opt) {
  const nn::NetShape& s = net.shape();
  for (int v : {s.wave_dim, s.fp_dim, s.wave_units, s.fp_units, s.lstm_units, s.outputs, int(s.softmax)})
    w.pod<std::int32_t>(v);
  w.vec(net.params());
  w.vec(opt.accumulator());
}

void read_net(Reader& r, nn::RecurrentNet<double>& net, nn::RmsProp<double>& opt, double decay, double eps) {
  nn::NetShape s;
  s.wave_dim = r.pod<std::int32_t>();
  s.fp_dim = r.pod<std::int32_t>();
  s.wave_units = r.pod<std::int32_t>();
  s.fp_units = r.pod<std::int32_t>();
  s.lstm_units = r.pod<std::int32_t>();
  s.outputs = r.pod<std::int32_t>();
  s.softmax = r.pod<std::int32_t>() != 0;
  if (s.wave_dim < 1 || s.fp_dim < 0 || s.lstm_units < 1 || s.outputs < 1 || s.wave_units < 1 || s.fp_units < 0)
    throw ParseError("checkpoint: bad network shape");
  net = nn::RecurrentNet<double>(s);
  net.params() = r.vec(net.num_params());
  opt = nn::RmsProp<double>(net.num_params(), decay, eps);
  opt.accumulator() = r.vec(net.num_params());
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Ma2cModel& model, const TrainConfig& config,
                     long steps_done) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  Writer w(path);
  w.raw(kMagic.data(), kMagic.size());
  w.pod<std::uint32_t>(kVersion);
  w.str(network_to_json(*model.spec));
  TrainConfig stored = config;
  stored.hp = model.hp;
  w.str(train_config_to_json(stored));
  w.pod<std::uint64_t>(static_cast<std::uint64_t>(steps_done));
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(model.nets.size()));
  for (const AgentNet& net : model.nets) {
    w.pod<std::uint64_t>(net.seed);
    write_net(w, net.actor, net.actor_opt);
    write_net(w, net.critic, net.critic_opt);
  }
  w.finish();
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  std::array<char, 8> magic{};
  r.raw(magic.data(), magic.size());
  if (magic != kMagic) throw ParseError("checkpoint: bad magic in '" + path.string() + "'");
  const auto version = r.pod<std::uint32_t>();
  if (version != kVersion) throw ParseError("checkpoint: unsupported version " + std::to_string(version));

  Checkpoint ck;
  auto spec = std::make_shared<const NetworkSpec>(parse_network(r.str()));
  ck.config = parse_train_config(r.str());
  ck.steps_done = static_cast<long>(r.pod<std::uint64_t>());
  const auto agents = r.pod<std::uint32_t>();
  if (agents != spec->num_agents()) throw ParseError("checkpoint: agent count does not match the network");

  ck.model.spec = spec;
  ck.model.neighbors = neighbor_graph(*spec);
  ck.model.hp = ck.config.hp;
  for (std::uint32_t a = 0; a < agents; ++a) {
    AgentNet net;
    net.seed = r.pod<std::uint64_t>();
    read_net(r, net.actor, net.actor_opt, ck.config.hp.rms_decay, ck.config.hp.rms_epsilon);
    read_net(r, net.critic, net.critic_opt, ck.config.hp.rms_decay, ck.config.hp.rms_epsilon);
    net.reset_state();
    ck.model.nets.push_back(std::move(net));
  }
  return ck;
}

}  // namespace ma2c
