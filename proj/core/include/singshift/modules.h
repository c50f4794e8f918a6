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

#ifndef SINGSHIFT_MODULES_H_
#define SINGSHIFT_MODULES_H_

#include <torch/torch.h>

#include <vector>

namespace singshift {

// Non-causal dilated WaveNet stack with gated tanh/sigmoid units, residual
// and skip 1x1 projections, and optional global conditioning. Input and
// output are [B, hidden, T]; the result is the sum of skip outputs.
class WaveNetImpl : public torch::nn::Module {
 public:
  WaveNetImpl(int hidden, int kernel, int dilation_rate, int layers,
              int cond_channels);

  torch::Tensor forward(torch::Tensor x, const torch::Tensor& g = {});

 private:
  int hidden_;
  int layers_;
  torch::nn::ModuleList in_layers_;
  torch::nn::ModuleList res_skip_;
  torch::nn::Conv1d cond_{nullptr};
};
TORCH_MODULE(WaveNet);

// HiFi-GAN residual block: pairs of (dilated conv, conv) with leaky ReLU,
// each pair added back to its input.
class ResBlockImpl : public torch::nn::Module {
 public:
  ResBlockImpl(int channels, int kernel, const std::vector<int>& dilations);

  torch::Tensor forward(torch::Tensor x);

 private:
  torch::nn::ModuleList dilated_;
  torch::nn::ModuleList plain_;
};
TORCH_MODULE(ResBlock);

// Multi-head self-attention over [B, C, T] with a learned per-head scalar
// bias for each relative offset in [-window, window] (clipped beyond).
class RelativeAttentionImpl : public torch::nn::Module {
 public:
  RelativeAttentionImpl(int channels, int heads, int window);

  torch::Tensor forward(const torch::Tensor& x);

 private:
  int channels_;
  int heads_;
  int window_;
  torch::nn::Conv1d q_{nullptr}, k_{nullptr}, v_{nullptr}, o_{nullptr};
  torch::Tensor rel_bias_;  // [heads, 2 * window + 1]
};
TORCH_MODULE(RelativeAttention);

// Post-norm transformer encoder: attention and a two-conv feed-forward
// block, each followed by residual add and channel layer norm.
class TransformerEncoderImpl : public torch::nn::Module {
 public:
  TransformerEncoderImpl(int channels, int filter, int heads, int layers,
                         int window, int ffn_kernel = 3);

  torch::Tensor forward(torch::Tensor x);

 private:
  torch::nn::ModuleList attn_;
  torch::nn::ModuleList norm1_;
  torch::nn::ModuleList ffn_in_;
  torch::nn::ModuleList ffn_out_;
  torch::nn::ModuleList norm2_;
};
TORCH_MODULE(TransformerEncoder);

// Layer norm over the channel axis of [B, C, T].
torch::Tensor ChannelLayerNorm(const torch::Tensor& x, torch::nn::LayerNormImpl& norm);

}  // namespace singshift

#endif  // SINGSHIFT_MODULES_H_
