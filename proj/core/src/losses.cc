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

#include "singshift/losses.h"

#include "singshift/error.h"

namespace singshift {

namespace {

torch::Tensor MeanPerItem(const torch::Tensor& x) { return x.flatten(1).mean(1); }

}  // namespace

const torch::Tensor& LossTerms::Get(const std::string& name) const {
  if (name == "mel_l1") return mel_l1;
  if (name == "kl") return kl;
  if (name == "adv_g") return adv_g;
  if (name == "adv_d") return adv_d;
  if (name == "feature_matching") return feature_matching;
  if (name == "anchor") return anchor;
  if (name == "total_g") return total_g;
  if (name == "total_d") return total_d;
  throw Error(ErrorCode::kArgument, "unknown loss term: " + name);
}

std::vector<double> LossTerms::Scalars() const {
  std::vector<double> out;
  for (const auto& name : LossTermNames()) {
    const torch::Tensor& t = Get(name);
    out.push_back(t.defined() ? t.detach().mean().item<double>() : 0.0);
  }
  return out;
}

torch::Tensor KlLoss(const torch::Tensor& z_p, const torch::Tensor& eps,
                     const torch::Tensor& logvar_q, const torch::Tensor& mean_p,
                     const torch::Tensor& logvar_p, const torch::Tensor& logdet) {
  const torch::Tensor logs_q = 0.5 * logvar_q;
  const torch::Tensor logs_p = 0.5 * logvar_p;
  const torch::Tensor diff = z_p - mean_p;
  const torch::Tensor terms =
      logs_p - logs_q + 0.5 * diff.square() * torch::exp(-2.0 * logs_p) - 0.5 * eps.square();
  const double frames = static_cast<double>(z_p.size(2));
  return (terms.sum({1, 2}) - logdet) / frames;
}

torch::Tensor L1PerItem(const torch::Tensor& a, const torch::Tensor& b) {
  return MeanPerItem(torch::abs(a - b));
}

torch::Tensor DiscriminatorAdversarialLoss(const std::vector<DiscriminatorOutput>& real,
                                           const std::vector<DiscriminatorOutput>& fake) {
  torch::Tensor loss;
  for (std::size_t i = 0; i < real.size(); ++i) {
    const torch::Tensor l =
        MeanPerItem((1.0 - real[i].score).square()) + MeanPerItem(fake[i].score.square());
    loss = loss.defined() ? loss + l : l;
  }
  return loss;
}

torch::Tensor GeneratorAdversarialLoss(const std::vector<DiscriminatorOutput>& fake) {
  torch::Tensor loss;
  for (const auto& f : fake) {
    const torch::Tensor l = MeanPerItem((1.0 - f.score).square());
    loss = loss.defined() ? loss + l : l;
  }
  return loss;
}

torch::Tensor FeatureMatchingLoss(const std::vector<DiscriminatorOutput>& real,
                                  const std::vector<DiscriminatorOutput>& fake) {
  torch::Tensor loss;
  for (std::size_t i = 0; i < real.size(); ++i) {
    for (std::size_t j = 0; j < real[i].features.size(); ++j) {
      const torch::Tensor l = L1PerItem(real[i].features[j].detach(), fake[i].features[j]);
      loss = loss.defined() ? loss + l : l;
    }
  }
  return loss;
}

void CheckFinite(const LossTerms& terms) {
  for (const auto& name : LossTermNames()) {
    const torch::Tensor& t = terms.Get(name);
    if (!t.defined()) continue;
    const torch::Tensor bad = torch::logical_not(torch::isfinite(t.detach().flatten()));
    if (bad.any().item<bool>()) {
      const auto element = bad.nonzero()[0][0].item<std::int64_t>();
      throw Error(ErrorCode::kNonFinite, "non-finite loss term " + name + " at batch element " +
                                             std::to_string(element));
    }
  }
}

}  // namespace singshift
