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

#ifndef SINGSHIFT_GENERATOR_H_
#define SINGSHIFT_GENERATOR_H_

#include <torch/torch.h>

#include <vector>

#include "singshift/config.h"

namespace singshift {

struct GeneratorOptions {
  int in_channels = 8;
  int cond_channels = 0;  // 0 disables global conditioning
  int channels = 32;      // width before the first upsampler
  std::vector<int> upsample_rates = {8, 8, 4};
  std::vector<int> resblock_kernels = {3};
  std::vector<std::vector<int>> resblock_dilations = {{1, 3}};
  // Indices of upsampling stages that receive the excitation. Empty means
  // all stages.
  std::vector<int> inject_stages;

  static GeneratorOptions ForDecoder(const ModelConfig& m);
  int HopSize() const;
  bool Injects(int stage) const;
};

// HiFi-GAN style upsampling generator. After every transposed-conv
// upsampler selected in `inject_stages`, the sample-rate excitation is
// average-pooled down to the stage rate, projected by a 1x1 conv to the
// stage width and added before the residual blocks.
class GeneratorImpl : public torch::nn::Module {
 public:
  explicit GeneratorImpl(const GeneratorOptions& opts);

  // x: [B, in_channels, T]; excitation: [B, 1, T * hop]; g: [B, cond, 1]
  // or undefined. Returns [B, 1, T * hop] in (-1, 1).
  torch::Tensor forward(const torch::Tensor& x, const torch::Tensor& excitation,
                        const torch::Tensor& g = {});

  const GeneratorOptions& options() const { return opts_; }

  // Stage widths after each upsampler.
  std::vector<int> StageChannels() const;

  // Zeroes every excitation projection, which makes the output independent
  // of the excitation input.
  void DisableInjection();

 private:
  GeneratorOptions opts_;
  torch::nn::Conv1d pre_{nullptr};
  torch::nn::Conv1d cond_{nullptr};
  torch::nn::ModuleList ups_;
  torch::nn::ModuleList source_proj_;
  torch::nn::ModuleList resblocks_;
  torch::nn::Conv1d post_{nullptr};
  std::vector<int> pool_factors_;
  std::vector<torch::Tensor> decimators_;  // unregistered; cast per call
};
TORCH_MODULE(Generator);

}  // namespace singshift

#endif  // SINGSHIFT_GENERATOR_H_
