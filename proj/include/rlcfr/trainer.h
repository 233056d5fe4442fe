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

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rlcfr/error.h"
#include "rlcfr/mdp.h"
#include "rlcfr/nn.h"

namespace rlcfr {

// Bounded ring; once full, new items overwrite the oldest.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw Error(ErrorCode::kInvalidArgument, "replay capacity must be positive");
  }

  void push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[inserted_ % capacity_] = std::move(item);
    }
    ++inserted_;
  }
  size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  size_t capacity() const { return capacity_; }
  uint64_t inserted() const { return inserted_; }
  const T& at(size_t i) const { return items_.at(i); }
  const T& sample(Rng& rng) const {
    if (items_.empty()) throw Error(ErrorCode::kInvalidArgument, "sampling an empty buffer");
    return items_[std::uniform_int_distribution<size_t>(0, items_.size() - 1)(rng)];
  }

 private:
  size_t capacity_;
  uint64_t inserted_ = 0;
  std::vector<T> items_;
};

enum class TrainStage : uint8_t { kBaseNonroot, kLearnedNonroot };

struct ValueDataParams {
  int samples = 20000;
  // Share of samples with synthetic pots and random beliefs; the rest come
  // from leaf reaches of full-depth solves.
  double synthetic_fraction = 0.5;
  int leaves_per_solve = 6;
  // Dirichlet concentration of random beliefs.
  double dirichlet_alpha = 1.0;
  int label_iterations = 250;
};

struct TrainConfig {
  GameConfig game = GameConfig::nl_leduc();
  DcfrParams solver;
  ExploreParams explore;
  TrainStage stage = TrainStage::kBaseNonroot;
  uint64_t seed = 1;
  int k = kDefaultK;
  double bet_range = kDefaultBetRange;

  // Value network (stage 1).
  std::vector<int> value_hidden{256, 256, 256, 256};
  ValueDataParams value_data;
  int value_steps = 20000;
  int pbs_batch = 512;
  double pbs_lr = 1e-5;
  double huber_delta = 1.0;
  size_t pbs_capacity = 500000;

  // Actor and critic (stage 2).
  std::vector<int> actor_hidden{128, 96};
  std::vector<int> critic_hidden{128, 96};
  int epochs = 20000;
  int rl_batch = 1024;
  double rl_lr = 1e-5;
  int updates_per_epoch = 1;
  // Epochs of sampling before the first gradient step.
  int warmup_epochs = 0;
  size_t rl_capacity = 200000;
  int checkpoint_every = 1000;
  // 3 adds a value-net refit under learned abstractions.
  int stages = 2;
};

// Value network input: pot and stacks as shares of all chips, both belief
// vectors, and each hand's check-down result per half pot.
int value_input_size(GameKind kind);
int value_output_size(GameKind kind);
NetworkSpec value_net_spec(const TrainConfig& cfg);
NetworkSpec actor_spec(const TrainConfig& cfg);
NetworkSpec critic_spec(const TrainConfig& cfg);

Beliefs showdown_equity(const PublicBeliefState& pbs);
std::vector<double> value_features(const PublicBeliefState& pbs);
// Network outputs are values per half pot; this converts them to antes.
double value_scale(const PublicBeliefState& pbs);
// Zero-sum adjusted chip values from a value network.
PbsValueFn net_value_fn(std::shared_ptr<const Mlp> net);

// Round-1 board-reveal PBSs labelled by exact solves.
std::vector<PbsSample> generate_value_data(const TrainConfig& cfg, int count, Rng& rng,
                                           const AbstractionPolicy& nonroot = base_nonroot_policy());

struct ValueTrainTrace {
  std::vector<double> loss;  // mean Huber loss per step, antes
};

// Gradient of the mean Huber loss (antes) over a batch.
Gradients value_gradient(const Mlp& net, const std::vector<const PbsSample*>& batch, double huber_delta,
                         double* loss);
ValueTrainTrace train_value_net(const ReplayBuffer<PbsSample>& data, Mlp& net, AdamState& opt, int steps,
                                int batch, double huber_delta, Rng& rng);
double mean_huber(const std::vector<PbsSample>& data, const Mlp& net, double huber_delta);

// Clamped to [-1, 1].
ActionVector actor_action(const Mlp& actor, const StateFeatures& s);
AbstractionPolicy learned_nonroot_policy(std::shared_ptr<const Mlp> actor, double bet_range);

RebelConfig rebel_config(const TrainConfig& cfg, PbsValueFn value_fn, std::shared_ptr<const Mlp> actor);

std::vector<TransitionSample> sample_epoch(const Mlp& actor, const RebelConfig& solve_cfg,
                                           const ExploreParams& explore, const TrainConfig& cfg, Rng& rng);

struct ActorCriticLoss {
  double critic_mse = 0.0;
  double actor_loss = 0.0;
};

// Critic gradient of mean squared error on a batch.
Gradients critic_gradient(const Mlp& critic, const std::vector<TransitionSample>& batch, double* mse);
// Actor gradient of -mean critic(s, actor(s)) through a frozen critic.
Gradients actor_gradient(const Mlp& actor, const Mlp& critic, const std::vector<StateFeatures>& states,
                         double* loss);

ActorCriticLoss train_actor_critic(const ReplayBuffer<TransitionSample>& buffer, Mlp& actor, AdamState& actor_opt,
                                   Mlp& critic, AdamState& critic_opt, int batch, int steps, Rng& rng);

double critic_estimate(const Mlp& critic, const StateFeatures& s, const ActionVector& a);

// Per-purpose RNG stream derived from the run seed.
Rng derive_rng(uint64_t seed, uint64_t stream, uint64_t index);

struct TrainingArtifacts {
  std::string value_checkpoint;
  std::string actor_checkpoint;
  std::string critic_checkpoint;
  int64_t value_wall_ms = 0;
  int epochs_done = 0;
};

// Runs the staged pipeline into out_dir. With resume, continues from the
// newest complete stage-2 checkpoint.
TrainingArtifacts run_training(const TrainConfig& cfg, const std::string& out_dir, bool resume,
                               const std::function<void(const std::string&)>& log = {});
TrainingArtifacts read_manifest(const std::string& out_dir);

}  // namespace rlcfr
