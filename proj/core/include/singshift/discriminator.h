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

#ifndef SINGSHIFT_DISCRIMINATOR_H_
#define SINGSHIFT_DISCRIMINATOR_H_

#include <torch/torch.h>

#include <vector>

#include "singshift/config.h"

namespace singshift {

struct DiscriminatorOutput {
  torch::Tensor score;                  // [B, N]
  std::vector<torch::Tensor> features;  // intermediate activations
};

// Folds the waveform into a [T / p, p] grid (reflect-padded to a multiple
// of p) and applies strided 2-D convolutions along the time axis.
class PeriodDiscriminatorImpl : public torch::nn::Module {
 public:
  PeriodDiscriminatorImpl(int period, const std::vector<int>& channels);

  DiscriminatorOutput forward(const torch::Tensor& wave);
  int period() const { return period_; }

 private:
  int period_;
  torch::nn::ModuleList convs_;
  torch::nn::Conv2d post_{nullptr};
};
TORCH_MODULE(PeriodDiscriminator);

class ScaleDiscriminatorImpl : public torch::nn::Module {
 public:
  explicit ScaleDiscriminatorImpl(const std::vector<int>& channels);

  DiscriminatorOutput forward(const torch::Tensor& wave);

 private:
  torch::nn::ModuleList convs_;
  torch::nn::Conv1d post_{nullptr};
};
TORCH_MODULE(ScaleDiscriminator);

// Multi-period discriminators followed by three multi-scale discriminators
// on the raw, 2x and 4x average-pooled waveform.
class MultiDiscriminatorImpl : public torch::nn::Module {
 public:
  MultiDiscriminatorImpl(const std::vector<int>& periods, const std::vector<int>& mpd_channels,
                         const std::vector<int>& msd_channels);
  explicit MultiDiscriminatorImpl(const ModelConfig& m)
      : MultiDiscriminatorImpl(m.mpd_periods, m.mpd_channels, m.msd_channels) {}

  // wave: [B, 1, T].
  std::vector<DiscriminatorOutput> forward(const torch::Tensor& wave);

 private:
  torch::nn::ModuleList periods_;
  torch::nn::ModuleList scales_;
};
TORCH_MODULE(MultiDiscriminator);

}  // namespace singshift

#endif  // SINGSHIFT_DISCRIMINATOR_H_
