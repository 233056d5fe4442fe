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

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rlcfr {

enum class OutputActivation : uint8_t { kIdentity = 0, kTanh = 1 };

struct NetworkSpec {
  // Input, hidden..., output.
  std::vector<int> layer_sizes;
  OutputActivation output = OutputActivation::kIdentity;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  bool operator==(const NetworkSpec&) const = default;
};

std::string describe(const NetworkSpec& spec);

struct NetworkParams {
  // weights[l] is out x in.
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  // dL/dinput, one column per sample.
  Eigen::MatrixXd input;
};

// Dense ReLU network. Batches are matrices with one sample per column.
class Mlp {
 public:
  explicit Mlp(NetworkSpec spec);  // all-zero parameters
  // Scaled uniform fan-in initialization: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static Mlp initialized(NetworkSpec spec, uint64_t seed);

  const NetworkSpec& spec() const { return spec_; }
  NetworkParams& params() { return params_; }
  const NetworkParams& params() const { return params_; }
  int64_t num_params() const;

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;
  std::vector<double> forward(const std::vector<double>& input) const;

  // Gradients of sum over the batch of <upstream, output>.
  Gradients backward(const Eigen::MatrixXd& input, const Eigen::MatrixXd& upstream) const;

 private:
  void check_input(const Eigen::MatrixXd& input) const;

  NetworkSpec spec_;
  NetworkParams params_;
};

// Huber loss on one residual: (loss, dloss/dpred).
std::pair<double, double> huber_loss(double pred, double target, double delta);
std::pair<double, double> squared_error(double pred, double target);

struct AdamState {
  int64_t step = 0;
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
};

AdamState make_adam(const Mlp& net, double lr);
// Bias-corrected update. Throws NONFINITE_GRAD before touching anything.
void adam_step(Mlp& net, const Gradients& grads, AdamState& state);

void save_checkpoint(const std::string& path, const Mlp& net, const AdamState* opt = nullptr);
struct Checkpoint {
  Mlp net;
  std::optional<AdamState> opt;
};
// Throws CORRUPT_CHECKPOINT on bad magic/checksum/truncation and
// SPEC_MISMATCH if `expected` is given and differs.
Checkpoint load_checkpoint(const std::string& path, const std::optional<NetworkSpec>& expected = std::nullopt);

}  // namespace rlcfr
