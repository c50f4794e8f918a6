// Copyright (c) 2026 The singshift Authors
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

#ifndef SINGSHIFT_CHECKPOINT_H_
#define SINGSHIFT_CHECKPOINT_H_

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace singshift {

// File layout: "SSCK", u32 version, u64 metadata length, metadata JSON
// (string -> string), u32 tensor count, then per tensor: u32 name length,
// name, u8 dtype, u32 rank, i64 dims, u64 byte count, raw little-endian
// data. Tensors keep insertion order so identical state yields identical
// bytes.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::string, torch::Tensor>> tensors;

  const std::string& Meta(const std::string& key) const;  // kCorruption if absent
  bool HasTensor(const std::string& name) const;
  const torch::Tensor& Tensor(const std::string& name) const;  // kCorruption if absent
};

// Writes to a temporary sibling and renames it into place.
void WriteCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint ReadCheckpoint(const std::filesystem::path& path);

// Parameters and buffers under `prefix` + their module path.
void AddModule(Checkpoint& ckpt, const std::string& prefix, const torch::nn::Module& module);
// Copies stored values into the module; kCorruption on a missing name or
// shape mismatch. Parameters whose first dimension differs are resized
// when `allow_resize` (used for the speaker table).
void LoadModule(const Checkpoint& ckpt, const std::string& prefix, torch::nn::Module& module,
                bool allow_resize = false);

// Adam moments. The step count is stored as a tensor too.
void AddAdam(Checkpoint& ckpt, const std::string& prefix, torch::optim::Adam& optimizer);
void LoadAdam(const Checkpoint& ckpt, const std::string& prefix, torch::optim::Adam& optimizer);

// Refuses (kConfig) a checkpoint whose model hash differs from `expected`
// unless `force`.
void CheckModelHash(const Checkpoint& ckpt, const std::string& expected, bool force);

}  // namespace singshift

#endif  // SINGSHIFT_CHECKPOINT_H_
