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

#include "singshift/modules.h"

#include <cmath>

namespace singshift {

namespace F = torch::nn::functional;

WaveNetImpl::WaveNetImpl(int hidden, int kernel, int dilation_rate, int layers,
                         int cond_channels)
    : hidden_(hidden), layers_(layers) {
  in_layers_ = register_module("in_layers", torch::nn::ModuleList());
  res_skip_ = register_module("res_skip", torch::nn::ModuleList());
  int dilation = 1;
  for (int i = 0; i < layers; ++i) {
    const int pad = (kernel * dilation - dilation) / 2;
    in_layers_->push_back(torch::nn::Conv1d(
        torch::nn::Conv1dOptions(hidden, 2 * hidden, kernel).dilation(dilation).padding(pad)));
    const int out = i < layers - 1 ? 2 * hidden : hidden;
    res_skip_->push_back(torch::nn::Conv1d(torch::nn::Conv1dOptions(hidden, out, 1)));
    dilation *= dilation_rate;
  }
  if (cond_channels > 0) {
    cond_ = register_module(
        "cond", torch::nn::Conv1d(torch::nn::Conv1dOptions(cond_channels, 2 * hidden * layers, 1)));
  }
}

torch::Tensor WaveNetImpl::forward(torch::Tensor x, const torch::Tensor& g) {
  torch::Tensor output = torch::zeros_like(x);
  torch::Tensor g_all;
  if (cond_ && g.defined()) g_all = cond_(g);
  for (int i = 0; i < layers_; ++i) {
    torch::Tensor a = in_layers_[i]->as<torch::nn::Conv1d>()->forward(x);
    if (g_all.defined()) a = a + g_all.narrow(1, 2 * hidden_ * i, 2 * hidden_);
    const torch::Tensor acts =
        torch::tanh(a.narrow(1, 0, hidden_)) * torch::sigmoid(a.narrow(1, hidden_, hidden_));
    const torch::Tensor rs = res_skip_[i]->as<torch::nn::Conv1d>()->forward(acts);
    if (i < layers_ - 1) {
      x = x + rs.narrow(1, 0, hidden_);
      output = output + rs.narrow(1, hidden_, hidden_);
    } else {
      output = output + rs;
    }
  }
  return output;
}

ResBlockImpl::ResBlockImpl(int channels, int kernel, const std::vector<int>& dilations) {
  dilated_ = register_module("dilated", torch::nn::ModuleList());
  plain_ = register_module("plain", torch::nn::ModuleList());
  for (int d : dilations) {
    dilated_->push_back(torch::nn::Conv1d(torch::nn::Conv1dOptions(channels, channels, kernel)
                                              .dilation(d)
                                              .padding((kernel * d - d) / 2)));
    plain_->push_back(torch::nn::Conv1d(
        torch::nn::Conv1dOptions(channels, channels, kernel).padding((kernel - 1) / 2)));
  }
}

torch::Tensor ResBlockImpl::forward(torch::Tensor x) {
  for (std::size_t i = 0; i < dilated_->size(); ++i) {
    torch::Tensor xt = F::leaky_relu(x, F::LeakyReLUFuncOptions().negative_slope(0.1));
    xt = dilated_[i]->as<torch::nn::Conv1d>()->forward(xt);
    xt = F::leaky_relu(xt, F::LeakyReLUFuncOptions().negative_slope(0.1));
    xt = plain_[i]->as<torch::nn::Conv1d>()->forward(xt);
    x = x + xt;
  }
  return x;
}

RelativeAttentionImpl::RelativeAttentionImpl(int channels, int heads, int window)
    : channels_(channels), heads_(heads), window_(window) {
  q_ = register_module("q", torch::nn::Conv1d(torch::nn::Conv1dOptions(channels, channels, 1)));
  k_ = register_module("k", torch::nn::Conv1d(torch::nn::Conv1dOptions(channels, channels, 1)));
  v_ = register_module("v", torch::nn::Conv1d(torch::nn::Conv1dOptions(channels, channels, 1)));
  o_ = register_module("o", torch::nn::Conv1d(torch::nn::Conv1dOptions(channels, channels, 1)));
  rel_bias_ = register_parameter("rel_bias", torch::zeros({heads, 2 * window + 1}));
}

torch::Tensor RelativeAttentionImpl::forward(const torch::Tensor& x) {
  const auto b = x.size(0);
  const auto t = x.size(2);
  const int dk = channels_ / heads_;
  auto split = [&](const torch::Tensor& y) {
    return y.view({b, heads_, dk, t}).transpose(2, 3);  // [B, H, T, dk]
  };
  const torch::Tensor q = split(q_(x));
  const torch::Tensor k = split(k_(x));
  const torch::Tensor v = split(v_(x));
  torch::Tensor scores = torch::matmul(q, k.transpose(2, 3)) / std::sqrt(static_cast<double>(dk));

  const auto opts = torch::TensorOptions().dtype(torch::kLong).device(x.device());
  const torch::Tensor pos = torch::arange(t, opts);
  const torch::Tensor rel =
      (pos.unsqueeze(0) - pos.unsqueeze(1)).clamp(-window_, window_) + window_;
  const torch::Tensor bias =
      rel_bias_.index_select(1, rel.reshape({-1})).view({heads_, t, t});
  scores = scores + bias.unsqueeze(0);

  const torch::Tensor attn = torch::softmax(scores, -1);
  const torch::Tensor out = torch::matmul(attn, v).transpose(2, 3).reshape({b, channels_, t});
  return o_(out);
}

torch::Tensor ChannelLayerNorm(const torch::Tensor& x, torch::nn::LayerNormImpl& norm) {
  return norm.forward(x.transpose(1, 2)).transpose(1, 2);
}

TransformerEncoderImpl::TransformerEncoderImpl(int channels, int filter, int heads,
                                               int layers, int window, int ffn_kernel) {
  attn_ = register_module("attn", torch::nn::ModuleList());
  norm1_ = register_module("norm1", torch::nn::ModuleList());
  ffn_in_ = register_module("ffn_in", torch::nn::ModuleList());
  ffn_out_ = register_module("ffn_out", torch::nn::ModuleList());
  norm2_ = register_module("norm2", torch::nn::ModuleList());
  const int pad = (ffn_kernel - 1) / 2;
  for (int i = 0; i < layers; ++i) {
    attn_->push_back(RelativeAttention(channels, heads, window));
    norm1_->push_back(torch::nn::LayerNorm(torch::nn::LayerNormOptions({channels})));
    ffn_in_->push_back(torch::nn::Conv1d(
        torch::nn::Conv1dOptions(channels, filter, ffn_kernel).padding(pad)));
    ffn_out_->push_back(torch::nn::Conv1d(
        torch::nn::Conv1dOptions(filter, channels, ffn_kernel).padding(pad)));
    norm2_->push_back(torch::nn::LayerNorm(torch::nn::LayerNormOptions({channels})));
  }
}

torch::Tensor TransformerEncoderImpl::forward(torch::Tensor x) {
  for (std::size_t i = 0; i < attn_->size(); ++i) {
    x = ChannelLayerNorm(x + attn_[i]->as<RelativeAttention>()->forward(x),
                         *norm1_[i]->as<torch::nn::LayerNorm>());
    torch::Tensor y = torch::relu(ffn_in_[i]->as<torch::nn::Conv1d>()->forward(x));
    y = ffn_out_[i]->as<torch::nn::Conv1d>()->forward(y);
    x = ChannelLayerNorm(x + y, *norm2_[i]->as<torch::nn::LayerNorm>());
  }
  return x;
}

}  // namespace singshift
