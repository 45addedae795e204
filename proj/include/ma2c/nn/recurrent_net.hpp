#ifndef MA2C_NN_RECURRENT_NET_HPP
#define MA2C_NN_RECURRENT_NET_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "ma2c/error.hpp"
#include "ma2c/nn/init.hpp"
#include "ma2c/nn/types.hpp"

namespace ma2c::nn {

/// Layer widths of one actor or critic network.
///
///   wave -> FC(wave_units, ReLU) ┐
///                                ├ concat -> LSTM(lstm_units) -> head(outputs)
///   fingerprints -> FC(fp_units, ReLU) ┘
///
/// The fingerprint branch exists only when fp_dim > 0.
struct NetShape {
  int wave_dim = 1;
  int fp_dim = 0;
  int wave_units = 128;
  int fp_units = 0;
  int lstm_units = 64;
  int outputs = 1;
  bool softmax = false;

  int fc_units() const { return wave_units + fp_units; }
  bool operator==(const NetShape&) const = default;
};

/// Hidden widths; the FC budget is split evenly when a fingerprint branch exists.
struct NetWidths {
  int fc_units = 128;
  int lstm_units = 64;
};

inline NetShape make_shape(int wave_dim, int fp_dim, int outputs, bool softmax, NetWidths widths = {}) {
  if (wave_dim < 1 || fp_dim < 0 || outputs < 1 || widths.fc_units < 2 || widths.lstm_units < 1)
    throw InvalidArgument("make_shape: bad dimensions");
  NetShape s;
  s.wave_dim = wave_dim;
  s.fp_dim = fp_dim;
  s.fp_units = fp_dim > 0 ? widths.fc_units / 2 : 0;
  s.wave_units = widths.fc_units - s.fp_units;
  s.lstm_units = widths.lstm_units;
  s.outputs = outputs;
  s.softmax = softmax;
  return s;
}

template <typename Scalar>
struct LstmState {
  Vec<Scalar> h;
  Vec<Scalar> c;

  static LstmState zeros(int units) { return {Vec<Scalar>::Zero(units), Vec<Scalar>::Zero(units)}; }
  bool operator==(const LstmState& o) const { return h == o.h && c == o.c; }
};

/// Activations kept for backpropagation through time.
template <typename Scalar>
struct StepCache {
  Vec<Scalar> x_wave, x_fp;
  Vec<Scalar> z_wave, z_fp;  // pre-ReLU
  Vec<Scalar> fc;            // concatenated ReLU outputs, LSTM input
  Vec<Scalar> h_prev, c_prev;
  Vec<Scalar> in_gate, forget_gate, out_gate, cell_cand;
  Vec<Scalar> c, tanh_c, h;
  Vec<Scalar> output;  // logits or value
  Vec<Scalar> policy;  // softmax(output) for actor nets
};

template <typename Scalar>
Vec<Scalar> softmax(const Vec<Scalar>& logits) {
  Vec<Scalar> e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

template <typename Scalar>
Vec<Scalar> sigmoid(const Vec<Scalar>& x) {
  return (Scalar(1) / (Scalar(1) + (-x.array()).exp())).matrix();
}

/// FC -> LSTM -> linear head, with all parameters in one flat vector.
template <typename Scalar>
class RecurrentNet {
 public:
  RecurrentNet() = default;
  explicit RecurrentNet(const NetShape& shape) : shape_(shape) {
    Eigen::Index at = 0;
    auto take = [&at](Eigen::Index n) {
      const Eigen::Index start = at;
      at += n;
      return start;
    };
    const Eigen::Index H = shape.lstm_units, F = shape.fc_units();
    off_.w_wave = take(Eigen::Index(shape.wave_units) * shape.wave_dim);
    off_.b_wave = take(shape.wave_units);
    off_.w_fp = take(Eigen::Index(shape.fp_units) * shape.fp_dim);
    off_.b_fp = take(shape.fp_units);
    off_.w_x = take(4 * H * F);
    off_.w_h = take(4 * H * H);
    off_.b_lstm = take(4 * H);
    off_.w_out = take(Eigen::Index(shape.outputs) * H);
    off_.b_out = take(shape.outputs);
    params_ = Vec<Scalar>::Zero(at);
  }

  /// Orthogonal weights, zero biases, LSTM forget-gate bias 1.
  template <typename Rng>
  void initialize(Rng& rng, double gain = 1.0) {
    const auto& s = shape_;
    const Eigen::Index H = s.lstm_units;
    params_.setZero();
    w_wave() = orthogonal<Scalar>(s.wave_units, s.wave_dim, rng, gain);
    if (s.fp_dim > 0) w_fp() = orthogonal<Scalar>(s.fp_units, s.fp_dim, rng, gain);
    w_x() = orthogonal<Scalar>(4 * H, s.fc_units(), rng, gain);
    w_h() = orthogonal<Scalar>(4 * H, H, rng, gain);
    b_lstm().segment(H, H).setConstant(Scalar(1));
    w_out() = orthogonal<Scalar>(s.outputs, H, rng, gain);
  }

  const NetShape& shape() const { return shape_; }
  Eigen::Index num_params() const { return params_.size(); }
  Vec<Scalar>& params() { return params_; }
  const Vec<Scalar>& params() const { return params_; }

  LstmState<Scalar> zero_state() const { return LstmState<Scalar>::zeros(shape_.lstm_units); }

  /// One recurrent step. `state` is advanced in place.
  StepCache<Scalar> forward(const Vec<Scalar>& x_wave, const Vec<Scalar>& x_fp, LstmState<Scalar>& state) const {
    const auto& s = shape_;
    if (x_wave.size() != s.wave_dim || x_fp.size() != s.fp_dim)
      throw InvalidArgument("RecurrentNet::forward: input dimension mismatch");
    if (state.h.size() != s.lstm_units || state.c.size() != s.lstm_units)
      throw InvalidArgument("RecurrentNet::forward: hidden state dimension mismatch");
    if (!x_wave.allFinite() || !x_fp.allFinite()) throw InvalidArgument("RecurrentNet::forward: non-finite input");
    const Eigen::Index H = s.lstm_units;

    StepCache<Scalar> k;
    k.x_wave = x_wave;
    k.x_fp = x_fp;
    k.z_wave = w_wave() * x_wave + b_wave();
    k.fc.resize(s.fc_units());
    k.fc.head(s.wave_units) = k.z_wave.cwiseMax(Scalar(0));
    if (s.fp_dim > 0) {
      k.z_fp = w_fp() * x_fp + b_fp();
      k.fc.tail(s.fp_units) = k.z_fp.cwiseMax(Scalar(0));
    }
    k.h_prev = state.h;
    k.c_prev = state.c;
    const Vec<Scalar> gates = w_x() * k.fc + w_h() * state.h + b_lstm();
    k.in_gate = sigmoid<Scalar>(gates.segment(0, H));
    k.forget_gate = sigmoid<Scalar>(gates.segment(H, H));
    k.out_gate = sigmoid<Scalar>(gates.segment(2 * H, H));
    k.cell_cand = gates.segment(3 * H, H).array().tanh().matrix();
    k.c = k.forget_gate.cwiseProduct(state.c) + k.in_gate.cwiseProduct(k.cell_cand);
    k.tanh_c = k.c.array().tanh().matrix();
    k.h = k.out_gate.cwiseProduct(k.tanh_c);
    k.output = w_out() * k.h + b_out();
    if (!k.output.allFinite()) throw InvalidArgument("RecurrentNet::forward: non-finite output");
    if (s.softmax) k.policy = softmax<Scalar>(k.output);
    state.h = k.h;
    state.c = k.c;
    return k;
  }

  /// Backpropagation through time over a cached sequence. `output_grads[t]`
  /// is dLoss/d(output_t); the initial hidden state is held constant.
  Vec<Scalar> backward(const std::vector<StepCache<Scalar>>& caches,
                       const std::vector<Vec<Scalar>>& output_grads) const {
    if (caches.size() != output_grads.size()) throw InvalidArgument("RecurrentNet::backward: length mismatch");
    const auto& s = shape_;
    const Eigen::Index H = s.lstm_units;
    RecurrentNet grad(s);  // reuse the layout for the gradient
    Vec<Scalar> dh_next = Vec<Scalar>::Zero(H), dc_next = Vec<Scalar>::Zero(H);
    Vec<Scalar> da(4 * H);
    for (std::size_t n = caches.size(); n-- > 0;) {
      const StepCache<Scalar>& k = caches[n];
      if (k.h.size() != H) throw InvalidArgument("RecurrentNet::backward: stale activation cache");
      const Vec<Scalar>& dy = output_grads[n];
      if (dy.size() != s.outputs) throw InvalidArgument("RecurrentNet::backward: output gradient size mismatch");

      grad.w_out().noalias() += dy * k.h.transpose();
      grad.b_out() += dy;
      const Vec<Scalar> dh = w_out().transpose() * dy + dh_next;
      const Vec<Scalar> d_out = dh.cwiseProduct(k.tanh_c);
      const Vec<Scalar> dc =
          dh.cwiseProduct(k.out_gate).cwiseProduct((Scalar(1) - k.tanh_c.array().square()).matrix()) + dc_next;
      const Vec<Scalar> d_in = dc.cwiseProduct(k.cell_cand);
      const Vec<Scalar> d_cand = dc.cwiseProduct(k.in_gate);
      const Vec<Scalar> d_forget = dc.cwiseProduct(k.c_prev);
      dc_next = dc.cwiseProduct(k.forget_gate);

      da.segment(0, H) = (d_in.array() * k.in_gate.array() * (Scalar(1) - k.in_gate.array())).matrix();
      da.segment(H, H) = (d_forget.array() * k.forget_gate.array() * (Scalar(1) - k.forget_gate.array())).matrix();
      da.segment(2 * H, H) = (d_out.array() * k.out_gate.array() * (Scalar(1) - k.out_gate.array())).matrix();
      da.segment(3 * H, H) = (d_cand.array() * (Scalar(1) - k.cell_cand.array().square())).matrix();

      grad.w_x().noalias() += da * k.fc.transpose();
      grad.w_h().noalias() += da * k.h_prev.transpose();
      grad.b_lstm() += da;
      dh_next.noalias() = w_h().transpose() * da;
      const Vec<Scalar> dfc = w_x().transpose() * da;

      const Vec<Scalar> dz_wave =
          dfc.head(s.wave_units).cwiseProduct((k.z_wave.array() > Scalar(0)).template cast<Scalar>().matrix());
      grad.w_wave().noalias() += dz_wave * k.x_wave.transpose();
      grad.b_wave() += dz_wave;
      if (s.fp_dim > 0) {
        const Vec<Scalar> dz_fp =
            dfc.tail(s.fp_units).cwiseProduct((k.z_fp.array() > Scalar(0)).template cast<Scalar>().matrix());
        grad.w_fp().noalias() += dz_fp * k.x_fp.transpose();
        grad.b_fp() += dz_fp;
      }
    }
    return std::move(grad.params_);
  }

  // Parameter views (column-major).
  auto w_wave() { return block(off_.w_wave, shape_.wave_units, shape_.wave_dim); }
  auto w_wave() const { return block(off_.w_wave, shape_.wave_units, shape_.wave_dim); }
  auto b_wave() { return params_.segment(off_.b_wave, shape_.wave_units); }
  auto b_wave() const { return params_.segment(off_.b_wave, shape_.wave_units); }
  auto w_fp() { return block(off_.w_fp, shape_.fp_units, shape_.fp_dim); }
  auto w_fp() const { return block(off_.w_fp, shape_.fp_units, shape_.fp_dim); }
  auto b_fp() { return params_.segment(off_.b_fp, shape_.fp_units); }
  auto b_fp() const { return params_.segment(off_.b_fp, shape_.fp_units); }
  auto w_x() { return block(off_.w_x, 4 * shape_.lstm_units, shape_.fc_units()); }
  auto w_x() const { return block(off_.w_x, 4 * shape_.lstm_units, shape_.fc_units()); }
  auto w_h() { return block(off_.w_h, 4 * shape_.lstm_units, shape_.lstm_units); }
  auto w_h() const { return block(off_.w_h, 4 * shape_.lstm_units, shape_.lstm_units); }
  auto b_lstm() { return params_.segment(off_.b_lstm, 4 * shape_.lstm_units); }
  auto b_lstm() const { return params_.segment(off_.b_lstm, 4 * shape_.lstm_units); }
  auto w_out() { return block(off_.w_out, shape_.outputs, shape_.lstm_units); }
  auto w_out() const { return block(off_.w_out, shape_.outputs, shape_.lstm_units); }
  auto b_out() { return params_.segment(off_.b_out, shape_.outputs); }
  auto b_out() const { return params_.segment(off_.b_out, shape_.outputs); }

  /// Named weight matrices, for inspection and tests.
  std::vector<Mat<Scalar>> weight_matrices() const {
    std::vector<Mat<Scalar>> out{w_wave()};
    if (shape_.fp_dim > 0) out.emplace_back(w_fp());
    out.emplace_back(w_x());
    out.emplace_back(w_h());
    out.emplace_back(w_out());
    return out;
  }

 private:
  struct Offsets {
    Eigen::Index w_wave = 0, b_wave = 0, w_fp = 0, b_fp = 0, w_x = 0, w_h = 0, b_lstm = 0, w_out = 0, b_out = 0;
  };

  Eigen::Map<Mat<Scalar>> block(Eigen::Index at, Eigen::Index rows, Eigen::Index cols) {
    return {params_.data() + at, rows, cols};
  }
  Eigen::Map<const Mat<Scalar>> block(Eigen::Index at, Eigen::Index rows, Eigen::Index cols) const {
    return {params_.data() + at, rows, cols};
  }

  NetShape shape_;
  Offsets off_;
  Vec<Scalar> params_;
};

}  // namespace ma2c::nn

#endif  // MA2C_NN_RECURRENT_NET_HPP
