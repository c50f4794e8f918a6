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

#include <gtest/gtest.h>
#include <torch/torch.h>

#include "singshift/converter.h"
#include "singshift/discriminator.h"
#include "singshift/error.h"
#include "support/model_fixtures.h"

namespace singshift {
namespace {

torch::Tensor ExcitationFor(double f0, std::int64_t frames, const PipelineConfig& cfg) {
  const F0Contour c = F0Contour::FromHz(std::vector<double>(frames, f0), cfg.audio.hop,
                                        cfg.audio.sample_rate);
  const auto e = ContourExcitation(c, frames * cfg.audio.hop, cfg.excitation);
  return torch::tensor(e).view({1, 1, -1});
}

TEST(GeneratorTest, OutputLengthIsFramesTimesHop) {
  const PipelineConfig cfg = PipelineConfig::Toy();
  torch::manual_seed(0);
  Generator gen(GeneratorOptions::ForDecoder(cfg.model));
  EXPECT_EQ(gen->options().HopSize(), cfg.audio.hop);
  torch::NoGradGuard guard;
  for (std::int64_t t : {1, 3, 17, 100}) {
    const auto x = torch::randn({2, cfg.model.latent_dim, t});
    const auto g = torch::randn({2, cfg.model.speaker_dim, 1});
    const auto y = gen->forward(x, torch::randn({2, 1, t * cfg.audio.hop}), g);
    EXPECT_EQ(y.sizes(), std::vector<std::int64_t>({2, 1, t * cfg.audio.hop})) << t;
    EXPECT_LT(y.abs().max().item<double>(), 1.0);
  }
  EXPECT_THROW(gen->forward(torch::randn({1, cfg.model.latent_dim, 4}),
                            torch::randn({1, 1, 4 * cfg.audio.hop - 1})),
               Error);
}

TEST(GeneratorTest, OddUpsampleRatesKeepTheContract) {
  GeneratorOptions o;
  o.in_channels = 4;
  o.channels = 16;
  o.upsample_rates = {3, 5, 2};
  torch::manual_seed(1);
  Generator gen(o);
  EXPECT_EQ(o.HopSize(), 30);
  EXPECT_EQ(gen->StageChannels(), std::vector<int>({8, 4, 2}));
  torch::NoGradGuard guard;
  for (std::int64_t t : {1, 6}) {
    EXPECT_EQ(gen->forward(torch::randn({1, 4, t}), torch::randn({1, 1, 30 * t})).size(2),
              30 * t);
  }
}

TEST(GeneratorTest, ExcitationDrivesTheOutputUntilInjectionIsDisabled) {
  const PipelineConfig cfg = PipelineConfig::Toy();
  torch::manual_seed(2);
  Generator gen(GeneratorOptions::ForDecoder(cfg.model));
  torch::NoGradGuard guard;
  const std::int64_t t = 20;
  const auto x = torch::randn({1, cfg.model.latent_dim, t});
  const auto g = torch::randn({1, cfg.model.speaker_dim, 1});
  const auto low = ExcitationFor(150.0, t, cfg), high = ExcitationFor(300.0, t, cfg);
  EXPECT_GT(testing::MaxAbsDiff(gen->forward(x, low, g), gen->forward(x, high, g)), 1e-6);
  gen->DisableInjection();
  EXPECT_TRUE(torch::equal(gen->forward(x, low, g), gen->forward(x, high, g)));
}

TEST(GeneratorTest, OnlySelectedStagesAreInjected) {
  PipelineConfig cfg = PipelineConfig::Toy();
  cfg.model.inject_stages = {1};
  torch::manual_seed(3);
  Generator gen(GeneratorOptions::ForDecoder(cfg.model));
  EXPECT_FALSE(gen->options().Injects(0));
  EXPECT_TRUE(gen->options().Injects(1));
  torch::NoGradGuard guard;
  const std::int64_t t = 8;
  const auto x = torch::randn({1, cfg.model.latent_dim, t});
  const auto low = ExcitationFor(150.0, t, cfg), high = ExcitationFor(300.0, t, cfg);
  for (auto& p : gen->named_parameters()) {
    if (p.key() == "source_proj.1.weight") p.value().zero_();
  }
  EXPECT_TRUE(torch::equal(gen->forward(x, low), gen->forward(x, high)));
}

TEST(DiscriminatorTest, EightSubDiscriminatorsWithFeatures) {
  const ModelConfig m = PipelineConfig::Toy().model;
  torch::manual_seed(4);
  MultiDiscriminator disc(m);
  for (std::int64_t len : {5, 256, 4096}) {
    const auto outs = disc->forward(torch::randn({2, 1, len}) * 0.1);
    ASSERT_EQ(outs.size(), 8u);
    for (const auto& o : outs) {
      EXPECT_EQ(o.score.dim(), 2);
      EXPECT_EQ(o.score.size(0), 2);
      EXPECT_GT(o.score.size(1), 0);
      EXPECT_FALSE(o.features.empty());
      EXPECT_TRUE(torch::isfinite(o.score).all().item<bool>());
    }
  }
}

TEST(DiscriminatorTest, PeriodFoldAndGradients) {
  torch::manual_seed(5);
  PeriodDiscriminator d(3, std::vector<int>{4, 8});
  EXPECT_EQ(d->period(), 3);
  const auto x = torch::randn({1, 1, 100}, torch::requires_grad());
  const auto out = d->forward(x);
  out.score.sum().backward();
  EXPECT_GT(x.grad().abs().sum().item<double>(), 0.0);
  ScaleDiscriminator s(std::vector<int>{4, 8});
  EXPECT_EQ(s->forward(torch::randn({3, 1, 64})).score.size(0), 3);
}

}  // namespace
}  // namespace singshift
