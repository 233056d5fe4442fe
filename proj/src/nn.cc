// Copyright 2026 The rlcfr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rlcfr/nn.h"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "rlcfr/error.h"

namespace rlcfr {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

std::string describe(const NetworkSpec& spec) {
  std::ostringstream out;
  for (size_t i = 0; i < spec.layer_sizes.size(); ++i) out << (i ? "-" : "") << spec.layer_sizes[i];
  out << (spec.output == OutputActivation::kTanh ? "/tanh" : "/linear");
  return out.str();
}

Mlp::Mlp(NetworkSpec spec) : spec_(std::move(spec)) {
  if (spec_.layer_sizes.size() < 2) throw Error(ErrorCode::kInvalidArgument, "network needs >= 2 layers");
  for (int n : spec_.layer_sizes) {
    if (n <= 0) throw Error(ErrorCode::kInvalidArgument, "layer sizes must be positive");
  }
  for (size_t l = 0; l + 1 < spec_.layer_sizes.size(); ++l) {
    params_.weights.push_back(Eigen::MatrixXd::Zero(spec_.layer_sizes[l + 1], spec_.layer_sizes[l]));
    params_.biases.push_back(Eigen::VectorXd::Zero(spec_.layer_sizes[l + 1]));
  }
}

Mlp Mlp::initialized(NetworkSpec spec, uint64_t seed) {
  Mlp net(std::move(spec));
  std::mt19937_64 rng(seed);
  for (size_t l = 0; l < net.params_.weights.size(); ++l) {
    auto& w = net.params_.weights[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
    for (Eigen::Index i = 0; i < net.params_.biases[l].size(); ++i) net.params_.biases[l][i] = dist(rng);
  }
  return net;
}

int64_t Mlp::num_params() const {
  int64_t n = 0;
  for (size_t l = 0; l < params_.weights.size(); ++l) n += params_.weights[l].size() + params_.biases[l].size();
  return n;
}

void Mlp::check_input(const Eigen::MatrixXd& input) const {
  if (input.rows() != spec_.input_size()) {
    throw Error(ErrorCode::kDimMismatch, "input has " + std::to_string(input.rows()) + " rows, expected " +
                                             std::to_string(spec_.input_size()));
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
  check_input(input);
  Eigen::MatrixXd a = input;
  const size_t last = params_.weights.size() - 1;
  for (size_t l = 0; l <= last; ++l) {
    Eigen::MatrixXd z = params_.weights[l] * a;
    z.colwise() += params_.biases[l];
    if (l < last) {
      a = z.cwiseMax(0.0);
    } else {
      a = spec_.output == OutputActivation::kTanh ? Eigen::MatrixXd(z.array().tanh()) : z;
    }
  }
  return a;
}

std::vector<double> Mlp::forward(const std::vector<double>& input) const {
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(input.data(), input.size());
  const Eigen::MatrixXd y = forward(x);
  return std::vector<double>(y.data(), y.data() + y.size());
}

Gradients Mlp::backward(const Eigen::MatrixXd& input, const Eigen::MatrixXd& upstream) const {
  check_input(input);
  if (upstream.rows() != spec_.output_size() || upstream.cols() != input.cols()) {
    throw Error(ErrorCode::kDimMismatch, "upstream gradient shape");
  }
  const size_t layers = params_.weights.size();
  // Activations per layer, input first.
  std::vector<Eigen::MatrixXd> acts{input};
  std::vector<Eigen::MatrixXd> pre;
  for (size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = params_.weights[l] * acts.back();
    z.colwise() += params_.biases[l];
    pre.push_back(z);
    if (l + 1 < layers) {
      acts.push_back(z.cwiseMax(0.0));
    } else {
      acts.push_back(spec_.output == OutputActivation::kTanh ? Eigen::MatrixXd(z.array().tanh()) : z);
    }
  }
  Gradients g;
  g.weights.resize(layers);
  g.biases.resize(layers);
  Eigen::MatrixXd delta = upstream;
  if (spec_.output == OutputActivation::kTanh) {
    delta = delta.array() * (1.0 - acts.back().array().square());
  }
  for (size_t l = layers; l-- > 0;) {
    g.weights[l] = delta * acts[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    Eigen::MatrixXd back = params_.weights[l].transpose() * delta;
    if (l > 0) {
      delta = back.array() * (pre[l - 1].array() > 0.0).cast<double>();
    } else {
      g.input = back;
    }
  }
  return g;
}

std::pair<double, double> huber_loss(double pred, double target, double delta) {
  const double x = pred - target;
  if (std::abs(x) <= delta) return {0.5 * x * x, x};
  return {delta * std::abs(x) - 0.5 * delta * delta, x > 0.0 ? delta : -delta};
}

std::pair<double, double> squared_error(double pred, double target) {
  const double x = pred - target;
  return {x * x, 2.0 * x};
}

AdamState make_adam(const Mlp& net, double lr) {
  AdamState s;
  s.lr = lr;
  for (size_t l = 0; l < net.params().weights.size(); ++l) {
    const auto& w = net.params().weights[l];
    s.m_w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    s.v_w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    s.m_b.push_back(Eigen::VectorXd::Zero(w.rows()));
    s.v_b.push_back(Eigen::VectorXd::Zero(w.rows()));
  }
  return s;
}

void adam_step(Mlp& net, const Gradients& grads, AdamState& state) {
  auto& p = net.params();
  if (grads.weights.size() != p.weights.size() || state.m_w.size() != p.weights.size()) {
    throw Error(ErrorCode::kDimMismatch, "gradient/optimizer layer count");
  }
  for (size_t l = 0; l < p.weights.size(); ++l) {
    if (grads.weights[l].rows() != p.weights[l].rows() || grads.weights[l].cols() != p.weights[l].cols() ||
        grads.biases[l].size() != p.biases[l].size()) {
      throw Error(ErrorCode::kDimMismatch, "gradient shape");
    }
    if (!grads.weights[l].allFinite() || !grads.biases[l].allFinite()) {
      throw Error(ErrorCode::kNonfiniteGrad, "layer " + std::to_string(l));
    }
  }
  state.step += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    param.array() -= state.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + state.eps);
  };
  for (size_t l = 0; l < p.weights.size(); ++l) {
    update(p.weights[l], state.m_w[l], state.v_w[l], grads.weights[l]);
    update(p.biases[l], state.m_b[l], state.v_b[l], grads.biases[l]);
  }
}

namespace {

constexpr char kMagic[8] = {'R', 'L', 'C', 'F', 'R', 'N', 'E', 'T'};
constexpr uint16_t kVersion = 1;

template <typename T>
void put(std::string& buf, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.append(bytes, sizeof(T));
}

void put_block(std::string& buf, const double* data, Eigen::Index n) {
  buf.append(reinterpret_cast<const char*>(data), n * sizeof(double));
}

class Reader {
 public:
  Reader(const std::string& buf, size_t end) : buf_(buf), end_(end) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  void get_block(double* data, Eigen::Index n) {
    need(n * sizeof(double));
    std::memcpy(data, buf_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
  }
  size_t pos() const { return pos_; }

 private:
  void need(size_t n) const {
    if (pos_ + n > end_) throw Error(ErrorCode::kCorruptCheckpoint, "truncated checkpoint");
  }
  const std::string& buf_;
  size_t end_;
  size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const Mlp& net, const AdamState* opt) {
  std::string buf(kMagic, sizeof(kMagic));
  put<uint16_t>(buf, kVersion);
  const auto& spec = net.spec();
  put<uint32_t>(buf, spec.layer_sizes.size());
  for (int n : spec.layer_sizes) put<uint32_t>(buf, n);
  put<uint8_t>(buf, static_cast<uint8_t>(spec.output));
  const auto& p = net.params();
  for (size_t l = 0; l < p.weights.size(); ++l) {
    // Row-major weights.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = p.weights[l];
    put_block(buf, w.data(), w.size());
    put_block(buf, p.biases[l].data(), p.biases[l].size());
  }
  put<uint8_t>(buf, opt ? 1 : 0);
  if (opt) {
    put<int64_t>(buf, opt->step);
    put<double>(buf, opt->lr);
    put<double>(buf, opt->beta1);
    put<double>(buf, opt->beta2);
    put<double>(buf, opt->eps);
    for (size_t l = 0; l < p.weights.size(); ++l) {
      for (const auto* m : {&opt->m_w[l], &opt->v_w[l]}) {
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = *m;
        put_block(buf, rm.data(), rm.size());
      }
      put_block(buf, opt->m_b[l].data(), opt->m_b[l].size());
      put_block(buf, opt->v_b[l].data(), opt->v_b[l].size());
    }
  }
  const uint32_t crc = crc32(0L, reinterpret_cast<const Bytef*>(buf.data()), buf.size());
  put<uint32_t>(buf, crc);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp);
    out.write(buf.data(), buf.size());
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error(ErrorCode::kIo, "cannot rename to " + path);
}

Checkpoint load_checkpoint(const std::string& path, const std::optional<NetworkSpec>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kMagic) + 6 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kCorruptCheckpoint, "bad magic in " + path);
  }
  const size_t body = buf.size() - 4;
  uint32_t stored;
  std::memcpy(&stored, buf.data() + body, 4);
  if (crc32(0L, reinterpret_cast<const Bytef*>(buf.data()), body) != stored) {
    throw Error(ErrorCode::kCorruptCheckpoint, "checksum mismatch in " + path);
  }
  Reader r(buf, body);
  for (size_t i = 0; i < sizeof(kMagic); ++i) r.get<char>();
  if (r.get<uint16_t>() != kVersion) throw Error(ErrorCode::kCorruptCheckpoint, "unknown version in " + path);
  NetworkSpec spec;
  const uint32_t n_layers = r.get<uint32_t>();
  if (n_layers < 2 || n_layers > 64) throw Error(ErrorCode::kCorruptCheckpoint, "bad layer count");
  for (uint32_t i = 0; i < n_layers; ++i) spec.layer_sizes.push_back(r.get<uint32_t>());
  spec.output = static_cast<OutputActivation>(r.get<uint8_t>());
  if (expected && !(*expected == spec)) {
    throw Error(ErrorCode::kSpecMismatch, path + " holds " + describe(spec) + ", expected " + describe(*expected));
  }
  Checkpoint ck{Mlp(spec), std::nullopt};
  auto& p = ck.net.params();
  for (size_t l = 0; l < p.weights.size(); ++l) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(p.weights[l].rows(), p.weights[l].cols());
    r.get_block(w.data(), w.size());
    p.weights[l] = w;
    r.get_block(p.biases[l].data(), p.biases[l].size());
  }
  if (r.get<uint8_t>() == 1) {
    AdamState s = make_adam(ck.net, 0.0);
    s.step = r.get<int64_t>();
    s.lr = r.get<double>();
    s.beta1 = r.get<double>();
    s.beta2 = r.get<double>();
    s.eps = r.get<double>();
    for (size_t l = 0; l < p.weights.size(); ++l) {
      for (auto* m : {&s.m_w[l], &s.v_w[l]}) {
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(m->rows(), m->cols());
        r.get_block(rm.data(), rm.size());
        *m = rm;
      }
      r.get_block(s.m_b[l].data(), s.m_b[l].size());
      r.get_block(s.v_b[l].data(), s.v_b[l].size());
    }
    ck.opt = std::move(s);
  }
  if (r.pos() != body) throw Error(ErrorCode::kCorruptCheckpoint, "trailing bytes in " + path);
  return ck;
}

}  // namespace rlcfr
