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

#include "singshift/generator.h"

#include <algorithm>

#include "singshift/error.h"
#include "singshift/modules.h"
#include "singshift/tensor_dsp.h"

namespace singshift {

namespace F = torch::nn::functional;

GeneratorOptions GeneratorOptions::ForDecoder(const ModelConfig& m) {
  GeneratorOptions o;
  o.in_channels = m.latent_dim;
  o.cond_channels = m.speaker_dim;
  o.channels = m.upsample_channels;
  o.upsample_rates = m.upsample_rates;
  o.resblock_kernels = m.resblock_kernels;
  o.resblock_dilations = m.resblock_dilations;
  o.inject_stages = m.inject_stages;
  return o;
}

int GeneratorOptions::HopSize() const {
  int p = 1;
  for (int r : upsample_rates) p *= r;
  return p;
}

bool GeneratorOptions::Injects(int stage) const {
  if (inject_stages.empty()) return true;
  return std::find(inject_stages.begin(), inject_stages.end(), stage) != inject_stages.end();
}

GeneratorImpl::GeneratorImpl(const GeneratorOptions& opts) : opts_(opts) {
  if (opts.resblock_kernels.size() != opts.resblock_dilations.size()) {
    throw Error(ErrorCode::kConfig, "resblock kernels and dilations differ in count");
  }
  pre_ = register_module("pre", torch::nn::Conv1d(
                                    torch::nn::Conv1dOptions(opts.in_channels, opts.channels, 7)
                                        .padding(3)));
  if (opts.cond_channels > 0) {
    cond_ = register_module(
        "cond", torch::nn::Conv1d(torch::nn::Conv1dOptions(opts.cond_channels, opts.channels, 1)));
  }
  ups_ = register_module("ups", torch::nn::ModuleList());
  source_proj_ = register_module("source_proj", torch::nn::ModuleList());
  resblocks_ = register_module("resblocks", torch::nn::ModuleList());

  const std::vector<int> widths = StageChannels();
  int in_ch = opts.channels;
  const int n = static_cast<int>(opts.upsample_rates.size());
  for (int i = 0; i < n; ++i) {
    const int u = opts.upsample_rates[i];
    ups_->push_back(torch::nn::ConvTranspose1d(
        torch::nn::ConvTranspose1dOptions(in_ch, widths[i], 2 * u).stride(u).padding(u / 2 + u % 2)
            .output_padding(u % 2)));
    // Every stage gets a projection so parameter names stay stable; stages
    // outside inject_stages simply never use theirs.
    source_proj_->push_back(
        torch::nn::Conv1d(torch::nn::Conv1dOptions(1, widths[i], 1).bias(false)));
    for (std::size_t j = 0; j < opts.resblock_kernels.size(); ++j) {
      resblocks_->push_back(
          ResBlock(widths[i], opts.resblock_kernels[j], opts.resblock_dilations[j]));
    }
    int factor = 1;
    for (int k = i + 1; k < n; ++k) factor *= opts.upsample_rates[k];
    pool_factors_.push_back(factor);
    decimators_.push_back(DecimationKernel(factor));
    in_ch = widths[i];
  }
  post_ = register_module(
      "post", torch::nn::Conv1d(torch::nn::Conv1dOptions(in_ch, 1, 7).padding(3).bias(false)));

  torch::NoGradGuard guard;
  for (auto& p : named_parameters()) {
    if (p.key().find("weight") != std::string::npos && p.value().dim() == 3 &&
        p.key().find("source_proj") == std::string::npos) {
      p.value().normal_(0.0, 0.01);
    }
  }
}

std::vector<int> GeneratorImpl::StageChannels() const {
  std::vector<int> widths;
  int ch = opts_.channels;
  for (std::size_t i = 0; i < opts_.upsample_rates.size(); ++i) {
    ch = std::max(1, ch / 2);
    widths.push_back(ch);
  }
  return widths;
}

void GeneratorImpl::DisableInjection() {
  torch::NoGradGuard guard;
  for (auto& m : *source_proj_) {
    m->as<torch::nn::Conv1d>()->weight.zero_();
  }
}

torch::Tensor GeneratorImpl::forward(const torch::Tensor& x, const torch::Tensor& excitation,
                                     const torch::Tensor& g) {
  const std::int64_t hop = opts_.HopSize();
  const std::int64_t frames = x.size(2);
  if (excitation.defined() && excitation.size(2) != frames * hop) {
    throw Error(ErrorCode::kDimension, "excitation length does not match frames * hop");
  }
  torch::Tensor h = pre_(x);
  if (cond_ && g.defined()) h = h + cond_(g);
  const std::size_t nk = opts_.resblock_kernels.size();
  for (std::size_t i = 0; i < opts_.upsample_rates.size(); ++i) {
    h = F::leaky_relu(h, F::LeakyReLUFuncOptions().negative_slope(0.1));
    h = ups_[i]->as<torch::nn::ConvTranspose1d>()->forward(h);
    if (excitation.defined() && opts_.Injects(static_cast<int>(i))) {
      const int f = pool_factors_[i];
      const torch::Tensor e = Decimate(excitation, decimators_[i], f);
      h = h + source_proj_[i]->as<torch::nn::Conv1d>()->forward(e);
    }
    torch::Tensor acc;
    for (std::size_t j = 0; j < nk; ++j) {
      torch::Tensor r = resblocks_[i * nk + j]->as<ResBlock>()->forward(h);
      acc = acc.defined() ? acc + r : r;
    }
    h = acc / static_cast<double>(nk);
  }
  h = F::leaky_relu(h, F::LeakyReLUFuncOptions().negative_slope(0.01));
  return torch::tanh(post_(h));
}

}  // namespace singshift
