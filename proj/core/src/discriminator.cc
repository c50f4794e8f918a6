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

#include "singshift/discriminator.h"

#include "singshift/error.h"

namespace singshift {

namespace F = torch::nn::functional;

namespace {

torch::Tensor Leaky(const torch::Tensor& x) {
  return F::leaky_relu(x, F::LeakyReLUFuncOptions().negative_slope(0.1));
}

}  // namespace

PeriodDiscriminatorImpl::PeriodDiscriminatorImpl(int period, const std::vector<int>& channels)
    : period_(period) {
  if (channels.empty()) throw Error(ErrorCode::kConfig, "empty discriminator channels");
  convs_ = register_module("convs", torch::nn::ModuleList());
  int in_ch = 1;
  for (int c : channels) {
    convs_->push_back(torch::nn::Conv2d(
        torch::nn::Conv2dOptions(in_ch, c, {5, 1}).stride({3, 1}).padding({2, 0})));
    in_ch = c;
  }
  convs_->push_back(
      torch::nn::Conv2d(torch::nn::Conv2dOptions(in_ch, in_ch, {5, 1}).padding({2, 0})));
  post_ = register_module(
      "post", torch::nn::Conv2d(torch::nn::Conv2dOptions(in_ch, 1, {3, 1}).padding({1, 0})));
}

DiscriminatorOutput PeriodDiscriminatorImpl::forward(const torch::Tensor& wave) {
  torch::Tensor x = wave;
  const auto b = x.size(0);
  const auto t = x.size(2);
  const auto pad = (period_ - t % period_) % period_;
  if (pad > 0) {
    F::PadFuncOptions opts({0, pad});
    if (pad < t) {
      opts.mode(torch::kReflect);
    } else {
      opts.mode(torch::kReplicate);
    }
    x = F::pad(x, opts);
  }
  x = x.view({b, 1, (t + pad) / period_, period_});
  DiscriminatorOutput out;
  for (auto& m : *convs_) {
    x = Leaky(m->as<torch::nn::Conv2d>()->forward(x));
    out.features.push_back(x);
  }
  x = post_(x);
  out.features.push_back(x);
  out.score = x.flatten(1);
  return out;
}

ScaleDiscriminatorImpl::ScaleDiscriminatorImpl(const std::vector<int>& channels) {
  if (channels.empty()) throw Error(ErrorCode::kConfig, "empty discriminator channels");
  convs_ = register_module("convs", torch::nn::ModuleList());
  convs_->push_back(
      torch::nn::Conv1d(torch::nn::Conv1dOptions(1, channels[0], 15).padding(7)));
  int in_ch = channels[0];
  for (std::size_t i = 1; i < channels.size(); ++i) {
    convs_->push_back(torch::nn::Conv1d(
        torch::nn::Conv1dOptions(in_ch, channels[i], 41).stride(4).padding(20)));
    in_ch = channels[i];
  }
  convs_->push_back(torch::nn::Conv1d(torch::nn::Conv1dOptions(in_ch, in_ch, 5).padding(2)));
  post_ = register_module("post",
                          torch::nn::Conv1d(torch::nn::Conv1dOptions(in_ch, 1, 3).padding(1)));
}

DiscriminatorOutput ScaleDiscriminatorImpl::forward(const torch::Tensor& wave) {
  torch::Tensor x = wave;
  DiscriminatorOutput out;
  for (auto& m : *convs_) {
    x = Leaky(m->as<torch::nn::Conv1d>()->forward(x));
    out.features.push_back(x);
  }
  x = post_(x);
  out.features.push_back(x);
  out.score = x.flatten(1);
  return out;
}

MultiDiscriminatorImpl::MultiDiscriminatorImpl(const std::vector<int>& periods,
                                               const std::vector<int>& mpd_channels,
                                               const std::vector<int>& msd_channels) {
  periods_ = register_module("periods", torch::nn::ModuleList());
  scales_ = register_module("scales", torch::nn::ModuleList());
  for (int p : periods) periods_->push_back(PeriodDiscriminator(p, mpd_channels));
  for (int i = 0; i < 3; ++i) scales_->push_back(ScaleDiscriminator(msd_channels));
}

std::vector<DiscriminatorOutput> MultiDiscriminatorImpl::forward(const torch::Tensor& wave) {
  std::vector<DiscriminatorOutput> outs;
  for (auto& m : *periods_) outs.push_back(m->as<PeriodDiscriminator>()->forward(wave));
  torch::Tensor x = wave;
  for (std::size_t i = 0; i < scales_->size(); ++i) {
    if (i > 0) x = F::avg_pool1d(x, F::AvgPool1dFuncOptions(4).stride(2).padding(2));
    outs.push_back(scales_[i]->as<ScaleDiscriminator>()->forward(x));
  }
  return outs;
}

}  // namespace singshift
