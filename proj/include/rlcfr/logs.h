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
#include <vector>

#include "rlcfr/mdp.h"

namespace rlcfr {

// Append-only little-endian logs. A file opens with a version byte and a
// seven-byte magic, then holds records prefixed by their u32 byte length.
//
// PBS record:  u32 key_len, public key, then per player
//              u32 n, n x (u64 infostate-key hash, f64 belief, f64 value).
// RL record:   u32 n_s, n_s x f64, u32 n_a, n_a x f64, f64 reward.
// Readers ignore a torn final record.
inline constexpr uint8_t kLogVersion = 1;
inline constexpr char kPbsLogMagic[] = "RLCFRPB";
inline constexpr char kRlLogMagic[] = "RLCFRRL";

uint64_t key_hash(const std::string& key);

void append_pbs_log(const std::string& path, const std::vector<PbsSample>& samples);
std::vector<PbsSample> read_pbs_log(const std::string& path);

void append_rl_log(const std::string& path, const std::vector<TransitionSample>& samples);
std::vector<TransitionSample> read_rl_log(const std::string& path);

// Rewrites a log keeping its first n records.
void truncate_log(const std::string& path, const char* magic, size_t n_records);

}  // namespace rlcfr
