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

#include <gtest/gtest.h>
#include <torch/torch.h>

#include "singshift/converter.h"
#include "singshift/error.h"
#include "support/model_fixtures.h"

namespace singshift {
namespace {

using testing::MaxAbsDiff;

const std::vector<std::int64_t> kFrameCounts = {1, 7, 100};

// Gives every zero-initialized coupling output a random value so the flow
// is no longer the identity.
void RandomizeFlow(Flow& flow, double scale) {
  torch::NoGradGuard guard;
  for (auto& p : flow->named_parameters()) {
    if (p.key().find("post") != std::string::npos) p.value().normal_(0.0, scale);
  }
}

TEST(ModulesTest, StacksPreserveShape) {
  torch::manual_seed(0);
  WaveNet wn(16, 5, 2, 4, 8);
  ResBlock rb(16, 3, std::vector<int>{1, 3, 5});
  TransformerEncoder enc(16, 32, 2, 2, 4);
  for (auto t : kFrameCounts) {
    const auto x = torch::randn({2, 16, t});
    const auto g = torch::randn({2, 8, 1});
    EXPECT_EQ(wn->forward(x, g).sizes(), x.sizes());
    EXPECT_EQ(rb->forward(x).sizes(), x.sizes());
    const auto y = enc->forward(x);
    EXPECT_EQ(y.sizes(), x.sizes());
    EXPECT_TRUE(torch::isfinite(y).all().item<bool>());
  }
  WaveNet plain(16, 3, 1, 2, 0);
  EXPECT_EQ(plain->forward(torch::randn({1, 16, 9})).sizes(), std::vector<std::int64_t>({1, 16, 9}));
}

TEST(ModulesTest, ConditioningChangesWaveNetOutput) {
  torch::manual_seed(1);
  WaveNet wn(8, 3, 1, 2, 4);
  const auto x = torch::randn({1, 8, 10});
  EXPECT_GT(MaxAbsDiff(wn->forward(x, torch::randn({1, 4, 1})),
                       wn->forward(x, torch::randn({1, 4, 1}))),
            1e-6);
}

TEST(ModulesTest, AttentionKeepsShapeAndLearnsRelativeBias) {
  torch::manual_seed(2);
  RelativeAttention attn(8, 2, 2);
  const auto x = torch::randn({1, 8, 12});
  const auto y = attn->forward(x);
  EXPECT_EQ(y.sizes(), x.sizes());
  const auto one = torch::randn({3, 8, 1});
  EXPECT_EQ(attn->forward(one).sizes(), one.sizes());
  bool found = false;
  for (const auto& p : attn->named_parameters()) {
    if (p.key() == "rel_bias") {
      EXPECT_EQ(p.value().sizes(), std::vector<std::int64_t>({2, 5}));
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(EncodersTest, PosteriorAndPriorShapes) {
  const PipelineConfig cfg = PipelineConfig::Toy();
  const ModelConfig& m = cfg.model;
  torch::manual_seed(3);
  PosteriorEncoder post(513, m);
  PriorEncoder prior(cfg.content.dim, m);
  for (auto t : kFrameCounts) {
    const auto g = torch::randn({2, m.speaker_dim, 1});
    const auto eps = torch::randn({2, m.latent_dim, t});
    const PosteriorSample q = post->forward(torch::rand({2, 513, t}), g, eps);
    EXPECT_EQ(q.mean.sizes(), std::vector<std::int64_t>({2, m.latent_dim, t}));
    EXPECT_EQ(q.logvar.sizes(), q.mean.sizes());
    EXPECT_LT(MaxAbsDiff(q.z, q.mean + torch::exp(0.5 * q.logvar) * eps), 1e-6);
    const PosteriorSample q0 = post->forward(torch::rand({2, 513, t}), g);
    EXPECT_LT(MaxAbsDiff(q0.z, q0.mean), 1e-7);

    const PriorStats p = prior->forward(torch::randn({2, cfg.content.dim, t}),
                                        torch::randn({2, 2, t}), g);
    EXPECT_EQ(p.mean.sizes(), q.mean.sizes());
    EXPECT_EQ(p.logvar.sizes(), q.mean.sizes());
  }
  EXPECT_THROW(prior->forward(torch::randn({1, cfg.content.dim, 5}), torch::randn({1, 2, 6}),
                              torch::randn({1, m.speaker_dim, 1})),
               Error);
}

TEST(FlowTest, FreshFlowIsIdentity) {
  const ModelConfig m = PipelineConfig::Toy().model;
  torch::manual_seed(4);
  Flow flow(m);
  const auto z = torch::randn({3, m.latent_dim, 20});
  const auto g = torch::randn({3, m.speaker_dim, 1});
  const FlowOutput out = flow->forward(z, g);
  // An even number of channel flips cancels.
  ASSERT_EQ(m.flow_couplings % 2, 0);
  EXPECT_EQ(MaxAbsDiff(out.z, z), 0.0);
  EXPECT_EQ(out.logdet.abs().max().item<double>(), 0.0);
}

TEST(FlowTest, InverseUndoesForward) {
  const ModelConfig m = PipelineConfig::Toy().model;
  torch::manual_seed(5);
  Flow flow(m);
  RandomizeFlow(flow, 0.1);
  torch::NoGradGuard guard;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto z = torch::randn({1, m.latent_dim, 16});
    const auto g = torch::randn({1, m.speaker_dim, 1});
    const FlowOutput out = flow->forward(z, g);
    EXPECT_GT(MaxAbsDiff(out.z, z), 1e-3);
    worst = std::max(worst, MaxAbsDiff(flow->inverse(out.z, g), z));
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(FlowTest, LogDeterminantMatchesJacobian) {
  ModelConfig m = PipelineConfig::Toy().model;
  m.latent_dim = 4;
  m.hidden = 8;
  torch::manual_seed(6);
  Flow flow(m);
  RandomizeFlow(flow, 0.3);
  flow->to(torch::kDouble);
  const std::int64_t t = 3;
  const auto z = torch::randn({1, m.latent_dim, t}, torch::kDouble);
  const auto g = torch::randn({1, m.speaker_dim, 1}, torch::kDouble);
  const auto f = [&](const torch::Tensor& flat) {
    return flow->forward(flat.view({1, m.latent_dim, t}), g).z.reshape({-1});
  };
  const auto x = z.reshape({-1}).clone().requires_grad_(true);
  const auto y = f(x);
  const std::int64_t n = y.numel();
  auto jac = torch::zeros({n, n}, torch::kDouble);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto grad = torch::autograd::grad({y[i]}, {x}, {}, true)[0];
    jac[i] = grad;
  }
  const double logdet = flow->forward(z, g).logdet.item<double>();
  EXPECT_NEAR(std::get<1>(torch::linalg_slogdet(jac)).item<double>(), logdet, 1e-9);
}

TEST(SynthesizerTest, SpeakerTableAndInferenceShapes) {
  auto s = testing::MakeToySetup(testing::TwoVoices(), 0.5);
  EXPECT_EQ(s.model->speaker_table().size(0), 2);
  EXPECT_EQ(s.model->registry().Index("tenor"), 1);
  EXPECT_THROW(s.model->registry().Index("bass"), Error);
  EXPECT_THROW(s.model->registry().Register("alto"), Error);
  const ConverterDataset data(s.utterances, s.cfg);
  const ConverterBatch b = data.Whole(0, s.model->registry());
  const std::int64_t t = b.mel.size(2);
  torch::NoGradGuard guard;
  const SynthesizerOutput out =
      s.model->forward(b, torch::randn({1, s.cfg.model.latent_dim, t}));
  EXPECT_EQ(out.wave.sizes(), b.wave.sizes());
  const auto wave = s.model->Infer(b.content, b.pitch, b.excitation, 1, 0.667,
                                   torch::randn({1, s.cfg.model.latent_dim, t}));
  EXPECT_EQ(wave.sizes(), b.wave.sizes());
  EXPECT_LT(wave.abs().max().item<double>(), 1.0);
}

}  // namespace
}  // namespace singshift
