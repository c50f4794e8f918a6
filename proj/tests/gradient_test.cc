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

#include <gtest/gtest.h>
#include <torch/torch.h>

#include <cmath>
#include <random>

#include "singshift/losses.h"
#include "singshift/trainer.h"
#include "support/gradcheck.h"
#include "support/model_fixtures.h"

namespace singshift {
namespace {

struct Probe {
  torch::Tensor param;
  std::int64_t index;
  double analytic;
};

using testing::CentralDifference;
using testing::RelativeError;

class DoubleTrainerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    torch::manual_seed(0);
    setup_ = testing::MakeToySetup({testing::TwoVoices()[0]}, 1.0);
    trainer_ = std::make_unique<ConverterTrainer>(setup_.cfg, setup_.model, 5);
    trainer_->model()->to(torch::kDouble);
    trainer_->discriminator()->to(torch::kDouble);
    trainer_->mel()->to(torch::kDouble);
    const ConverterDataset data(setup_.utterances, setup_.cfg);
    batch_ = data.Whole(0, setup_.model->registry()).To(torch::kDouble);
    eps_ = torch::randn({1, setup_.cfg.model.latent_dim, batch_.mel.size(2)}, torch::kDouble);
  }

  double TotalG() { return trainer_->GeneratorLosses(batch_, eps_).total_g.mean().item<double>(); }
  double Kl() { return trainer_->GeneratorLosses(batch_, eps_).kl.mean().item<double>(); }

  testing::ToySetup setup_;
  std::unique_ptr<ConverterTrainer> trainer_;
  ConverterBatch batch_;
  torch::Tensor eps_;
};

TEST_F(DoubleTrainerTest, GradientsReachEveryGeneratorComponent) {
  auto& model = trainer_->model();
  model->zero_grad();
  trainer_->GeneratorLosses(batch_, eps_).total_g.mean().backward();
  auto norm_of = [&](const std::string& prefix) {
    double acc = 0.0;
    for (const auto& p : model->named_parameters()) {
      if (p.key().rfind(prefix, 0) != 0 || !p.value().grad().defined()) continue;
      EXPECT_TRUE(torch::isfinite(p.value().grad()).all().item<bool>()) << p.key();
      acc += p.value().grad().square().sum().item<double>();
    }
    return std::sqrt(acc);
  };
  for (const char* prefix : {"posterior.", "prior.", "flow.", "decoder.", "speaker_table"}) {
    const double n = norm_of(prefix);
    EXPECT_GT(n, 1e-8) << prefix;
    EXPECT_LT(n, 1e6) << prefix;
  }
  // Every decoder tensor, including each excitation projection, is reached.
  for (const auto& p : model->decoder->named_parameters()) {
    ASSERT_TRUE(p.value().grad().defined()) << p.key();
    EXPECT_GT(p.value().grad().abs().sum().item<double>(), 0.0) << p.key();
  }
}

TEST_F(DoubleTrainerTest, TotalGeneratorLossMatchesFiniteDifferences) {
  auto& model = trainer_->model();
  model->zero_grad();
  trainer_->GeneratorLosses(batch_, eps_).total_g.mean().backward();
  std::vector<torch::Tensor> params;
  for (auto& p : model->parameters()) {
    if (p.grad().defined() && p.grad().abs().max().item<double>() >= 1e-4) params.push_back(p);
  }
  ASSERT_FALSE(params.empty());
  std::mt19937_64 rng(99);
  std::vector<Probe> probes;
  while (probes.size() < 20) {
    auto& p = params[std::uniform_int_distribution<std::size_t>(0, params.size() - 1)(rng)];
    const auto k = std::uniform_int_distribution<std::int64_t>(0, p.numel() - 1)(rng);
    const double g = p.grad().view({-1})[k].item<double>();
    if (std::abs(g) >= 1e-4) probes.push_back({p, k, g});
  }
  int within = 0;
  for (auto& pr : probes) {
    const double fd = CentralDifference([&] { return TotalG(); }, pr.param, pr.index, 1e-5);
    const double err = RelativeError(fd, pr.analytic);
    EXPECT_LE(err, 1e-3) << "analytic " << pr.analytic << " numeric " << fd;
    within += err <= 1e-3;
  }
  EXPECT_EQ(within, 20);
}

TEST_F(DoubleTrainerTest, KlGradientMatchesFiniteDifferencesForPosterior) {
  auto& model = trainer_->model();
  model->zero_grad();
  trainer_->GeneratorLosses(batch_, eps_).kl.mean().backward();
  int checked = 0;
  for (auto& p : model->posterior->named_parameters()) {
    auto param = p.value();
    const auto grad = param.grad().view({-1});
    const auto k = grad.abs().argmax().item<std::int64_t>();
    const double g = grad[k].item<double>();
    ASSERT_GT(std::abs(g), 1e-8) << p.key();
    const double fd = CentralDifference([&] { return Kl(); }, param, k, 1e-5);
    EXPECT_LE(RelativeError(fd, g), 1e-3) << p.key() << " analytic " << g << " numeric " << fd;
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

}  // namespace
}  // namespace singshift
