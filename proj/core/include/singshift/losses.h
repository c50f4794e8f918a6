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

#ifndef SINGSHIFT_LOSSES_H_
#define SINGSHIFT_LOSSES_H_

#include <torch/torch.h>

#include <string>
#include <vector>

#include "singshift/config.h"
#include "singshift/discriminator.h"

namespace singshift {

// Loss values follow the names used in the loss history.
inline const std::vector<std::string>& LossTermNames() {
  static const std::vector<std::string> kNames = {
      "mel_l1", "kl", "adv_g", "adv_d", "feature_matching", "anchor", "total_g", "total_d"};
  return kNames;
}

// Every term is kept per batch element ([B]) so a non-finite value can be
// traced to its source; scalars are the batch means.
struct LossTerms {
  torch::Tensor mel_l1;
  torch::Tensor kl;
  torch::Tensor adv_g;
  torch::Tensor adv_d;
  torch::Tensor feature_matching;
  torch::Tensor anchor;  // refiner only; zeros for the converter
  torch::Tensor total_g;
  torch::Tensor total_d;

  const torch::Tensor& Get(const std::string& name) const;
  // Batch means as doubles, in LossTermNames() order; undefined terms are 0.
  std::vector<double> Scalars() const;
};

// Single-sample estimate of KL(q(z|y) || p(f(z)|c)) with the flow
// Jacobian: sum over channels and frames of
//   logs_p - logs_q + (z_p - m_p)^2 / (2 exp(2 logs_p)) - eps^2 / 2
// minus log|det df/dz|, divided by the frame count. logs = logvar / 2.
// Returns [B].
torch::Tensor KlLoss(const torch::Tensor& z_p, const torch::Tensor& eps,
                     const torch::Tensor& logvar_q, const torch::Tensor& mean_p,
                     const torch::Tensor& logvar_p, const torch::Tensor& logdet);

// Mean absolute difference per element. Returns [B].
torch::Tensor L1PerItem(const torch::Tensor& a, const torch::Tensor& b);

// Least-squares GAN terms summed over sub-discriminators. Returns [B].
torch::Tensor DiscriminatorAdversarialLoss(const std::vector<DiscriminatorOutput>& real,
                                           const std::vector<DiscriminatorOutput>& fake);
torch::Tensor GeneratorAdversarialLoss(const std::vector<DiscriminatorOutput>& fake);

// L1 between intermediate features, summed over layers and
// sub-discriminators. Real features are treated as constants. Returns [B].
torch::Tensor FeatureMatchingLoss(const std::vector<DiscriminatorOutput>& real,
                                  const std::vector<DiscriminatorOutput>& fake);

// Throws kNonFinite naming the first non-finite term and batch element.
void CheckFinite(const LossTerms& terms);

}  // namespace singshift

#endif  // SINGSHIFT_LOSSES_H_
