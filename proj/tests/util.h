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

#include <gtest/gtest.h>

#include "rlcfr/error.h"
#include "rlcfr/game.h"

namespace rlcfr::testing {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

inline GameState deal(const GameConfig& cfg, int c0, int c1) {
  const int n = num_cards(cfg.kind);
  return apply(GameState::initial(cfg), GameAction::chance(cfg.kind == GameKind::kToy ? c0 : c0 * n + c1));
}

}  // namespace rlcfr::testing
