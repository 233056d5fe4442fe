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
#include <string>

#include "rlcfr/eval.h"

namespace rlcfr {

struct EvalConfig {
  AgentKind agent_a = AgentKind::kRlcfr;
  AgentKind agent_b = AgentKind::kBaseFixed;
  int64_t hands = 1000;
  bool gate = true;
  // Directory written by `train`; holds the network checkpoints.
  std::string run_dir;
  int exploit_states = 100;
  std::string ledger;
};

struct ExperimentConfig {
  TrainConfig train;
  EvalConfig eval;
};

// INI text with sections [game] [solver] [explore] [value] [train] [eval].
// Unknown sections or keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string format_config(const ExperimentConfig& cfg);

}  // namespace rlcfr
