// Copyright 2026 The qfc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QFC_RL_CHECKPOINT_HPP_
#define QFC_RL_CHECKPOINT_HPP_

// Policy checkpoint file: a text manifest followed by a binary blob.
//
//   qfc-ckpt-1
//   scenario mbs
//   observation full_state
//   obs_dim 9
//   hidden 64,64,64
//   lstm_hidden 0
//   stop_head 0
//   meta <key> <value>            (any number)
//   tensor <name> <rows> <cols>   (one per tensor, in blob order)
//   blob <count>
//   <count little-endian IEEE-754 doubles>

#include <filesystem>
#include <map>
#include <string>

#include "qfc/rl/actor_critic.hpp"
#include "qfc/rl/envs.hpp"

namespace qfc::rl {

inline constexpr const char* kCheckpointVersion = "qfc-ckpt-1";

struct Checkpoint {
  Scenario scenario = Scenario::kMbs;
  ArchConfig arch;
  NetworkParams params;
  std::map<std::string, std::string> meta;
};

// Throws IoError when the file cannot be written.
void save_checkpoint(const std::filesystem::path& path, Scenario scenario,
                     const ActorCritic& model, const std::map<std::string, std::string>& meta = {});
// Throws MissingCheckpoint if the file is absent and IoError if it is
// malformed.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace qfc::rl

#endif  // QFC_RL_CHECKPOINT_HPP_
