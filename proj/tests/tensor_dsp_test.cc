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

#include "singshift/tensor_dsp.h"

#include <gtest/gtest.h>
#include <torch/torch.h>

#include <cmath>
#include <numbers>

#include "singshift/error.h"
#include "singshift/mel.h"
#include "singshift/toy_corpus.h"
#include "support/model_fixtures.h"

namespace singshift {
namespace {

TEST(MelTransformTest, MatchesReferenceSpectrogram) {
  const AudioConfig cfg;
  MelTransform mel(cfg);
  for (std::size_t len : {1u, 300u, 5000u, 24000u}) {
    Waveform w = Sawtooth(233.0, static_cast<double>(len) / 24000.0, 24000);
    w.samples.resize(len, 0.0f);
    const MelSpectrogram ref = ComputeMel(w, cfg);
    const auto out = mel->forward(VectorToTensor(w.samples).view({1, -1}));
    ASSERT_EQ(out.size(2), static_cast<std::int64_t>(ref.frames())) << len;
    const auto expected = MatrixToChannels(ref.values).unsqueeze(0);
    EXPECT_LT(testing::MaxAbsDiff(out, expected), 2e-3) << len;
  }
}

TEST(MelTransformTest, MagnitudesMatchAndGradientsFlow) {
  AudioConfig cfg;
  MelTransform mel(cfg);
  const Waveform w = Sawtooth(180.0, 0.2, 24000);
  const auto mags = mel->Magnitudes(VectorToTensor(w.samples).view({1, 1, -1}));
  const Matrix ref = LinearSpectrogram(w.samples, cfg);
  EXPECT_LT(testing::MaxAbsDiff(mags[0], MatrixToChannels(ref)), 1e-3);

  const auto x = (VectorToTensor(w.samples).view({1, -1}) * 1.0).requires_grad_(true);
  mel->forward(x).sum().backward();
  EXPECT_TRUE(torch::isfinite(x.grad()).all().item<bool>());
  EXPECT_GT(x.grad().abs().sum().item<double>(), 0.0);

  mel->to(torch::kDouble);
  const auto d = mel->forward(VectorToTensor(w.samples).to(torch::kDouble).view({1, -1}));
  EXPECT_EQ(d.scalar_type(), torch::kDouble);
}

TEST(LowPassTest, PassesLowAndStopsHighFrequencies) {
  LowPass lp(4000.0, 24000);
  const int n = 4800;
  auto tone = [&](double f) {
    std::vector<float> v(n);
    for (int i = 0; i < n; ++i) v[i] = std::sin(2.0 * std::numbers::pi * f * i / 24000.0);
    return VectorToTensor(v).view({1, 1, -1});
  };
  auto interior_rms = [&](const torch::Tensor& y) {
    return y.narrow(2, 200, n - 400).square().mean().sqrt().item<double>();
  };
  const auto dc = lp->forward(torch::ones({1, 1, n}));
  EXPECT_EQ(dc.size(2), n);
  EXPECT_NEAR(dc[0][0][n / 2].item<double>(), 1.0, 1e-5);
  EXPECT_NEAR(interior_rms(lp->forward(tone(500.0))), std::sqrt(0.5), 0.01);
  EXPECT_LT(interior_rms(lp->forward(tone(8000.0))), 0.01);
}

TEST(DecimateTest, KeepsPassbandAndSuppressesAliases) {
  for (int factor : {4, 32}) {
    const int n = 1536 * factor;
    const auto kernel = DecimationKernel(factor);
    EXPECT_EQ(kernel.size(2), 16 * factor + 1);
    auto tone = [&](double cycles) {
      std::vector<float> v(n);
      for (int i = 0; i < n; ++i) v[i] = std::sin(2.0 * std::numbers::pi * cycles * i);
      return VectorToTensor(v).view({1, 1, -1});
    };
    auto interior_rms = [&](const torch::Tensor& y) {
      return y.narrow(2, 64, y.size(2) - 128).square().mean().sqrt().item<double>();
    };
    const auto dc = Decimate(torch::ones({1, 1, n}), kernel, factor);
    ASSERT_EQ(dc.size(2), n / factor);
    EXPECT_NEAR(dc[0][0][n / factor / 2].item<double>(), 1.0, 1e-5);
    EXPECT_NEAR(interior_rms(Decimate(tone(0.2 / factor), kernel, factor)), std::sqrt(0.5),
                0.01);
    EXPECT_LT(interior_rms(Decimate(tone(0.75 / factor), kernel, factor)), 2e-3);
    EXPECT_LT(interior_rms(Decimate(tone(2.3 / factor), kernel, factor)), 2e-3);
  }
  const auto x = torch::randn({2, 1, 64});
  EXPECT_TRUE(torch::equal(Decimate(x, DecimationKernel(1), 1), x));
  EXPECT_THROW(DecimationKernel(0), Error);
}

TEST(ConversionTest, MatrixAndVectorRoundTrips) {
  Matrix m(3, 5);
  for (std::size_t i = 0; i < m.data().size(); ++i) m.data()[i] = static_cast<float>(i) - 4.5f;
  const auto t = MatrixToChannels(m);
  EXPECT_EQ(t.sizes(), std::vector<std::int64_t>({5, 3}));
  EXPECT_EQ(t[4][1].item<float>(), m(1, 4));
  EXPECT_EQ(ChannelsToMatrix(t), m);
  Matrix row(1, 4, 2.0f);
  const auto rt = MatrixToChannels(row);
  row(0, 0) = 9.0f;
  EXPECT_EQ(rt[0][0].item<float>(), 2.0f);
  const std::vector<float> v = {1.0f, -2.0f, 3.5f};
  EXPECT_EQ(TensorToVector(VectorToTensor(v)), v);
}

}  // namespace
}  // namespace singshift
