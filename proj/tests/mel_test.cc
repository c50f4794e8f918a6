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

#include "singshift/mel.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "singshift/audio.h"
#include "singshift/error.h"
#include "singshift/fft.h"
#include "support/test_util.h"

namespace singshift {
namespace {

TEST(MelScaleTest, MatchesHtkFormula) {
  for (double hz : {0.0, 100.0, 700.0, 1000.0, 4000.0, 12000.0}) {
    EXPECT_NEAR(HzToMel(hz), 2595.0 * std::log10(1.0 + hz / 700.0), 1e-9);
    EXPECT_NEAR(MelToHz(HzToMel(hz)), hz, 1e-7 * (1.0 + hz));
  }
  EXPECT_NEAR(HzToMel(1000.0), 1000.0, 0.1);
}

TEST(MelScaleTest, CentersAreEquallySpacedInMel) {
  const AudioConfig cfg;
  const auto centers = MelCenterFrequencies(cfg);
  ASSERT_EQ(centers.size(), 80u);
  const double step = (HzToMel(cfg.fmax) - HzToMel(cfg.fmin)) / (cfg.n_mels + 1);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    EXPECT_NEAR(HzToMel(centers[i]), HzToMel(cfg.fmin) + step * (i + 1), 1e-6);
  }
}

TEST(MelFilterbankTest, TrianglesHaveUnitAreaInHz) {
  const AudioConfig cfg;
  const Matrix fb = MelFilterbank(cfg);
  ASSERT_EQ(fb.rows(), 80u);
  ASSERT_EQ(fb.cols(), 513u);
  const double df = static_cast<double>(cfg.sample_rate) / cfg.n_fft;
  int checked = 0;
  for (std::size_t m = 0; m < fb.rows(); ++m) {
    int support = 0;
    double area = 0.0;
    for (float w : fb.row(m)) {
      EXPECT_GE(w, 0.0f);
      support += w > 0.0f;
      area += w * df;
    }
    if (support >= 8) {
      EXPECT_NEAR(area, 1.0, 0.05) << "filter " << m;
      ++checked;
    }
  }
  EXPECT_GT(checked, 40);
}

TEST(FftTest, MatchesNaiveDftAndInverts) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int size : {8, 30, 64, 1024}) {
    std::vector<double> x(size);
    for (double& v : x) v = n(rng);
    RealFft fft(size);
    std::vector<std::complex<double>> spec(fft.bins());
    fft.Forward(x, spec);
    const auto ref = testing::NaiveDft(x);
    for (int k = 0; k < fft.bins(); ++k) {
      EXPECT_NEAR(std::abs(spec[k] - ref[k]), 0.0, 1e-8 * size);
    }
    std::vector<double> back(size);
    fft.Inverse(spec, back);
    for (int i = 0; i < size; ++i) EXPECT_NEAR(back[i] / size, x[i], 1e-10);
  }
}

TEST(SpectrogramTest, FrameCountIsCeilingOfHops) {
  EXPECT_EQ(AnalysisFrameCount(0, 256), 0u);
  EXPECT_EQ(AnalysisFrameCount(1, 256), 1u);
  EXPECT_EQ(AnalysisFrameCount(256, 256), 1u);
  EXPECT_EQ(AnalysisFrameCount(257, 256), 2u);
  EXPECT_EQ(AnalysisFrameCount(24000, 256), 94u);
  const AudioConfig cfg;
  for (std::size_t len : {1u, 255u, 256u, 1000u, 24000u}) {
    Waveform w{std::vector<float>(len, 0.1f), cfg.sample_rate};
    EXPECT_EQ(ComputeMel(w, cfg).frames(), AnalysisFrameCount(len, cfg.hop));
  }
}

TEST(SpectrogramTest, CenteredFrameReflectsAtEdges) {
  const std::vector<float> s = {0, 1, 2, 3, 4};
  std::vector<double> out(4);
  CenteredFrame(s, 0, out);
  EXPECT_EQ(out, std::vector<double>({2, 1, 0, 1}));
  CenteredFrame(s, 4, out);
  EXPECT_EQ(out, std::vector<double>({2, 3, 4, 3}));
}

TEST(SpectrogramTest, LinearMagnitudesMatchDirectDft) {
  AudioConfig cfg;
  cfg.n_fft = 64;
  cfg.win = 48;
  cfg.hop = 16;
  cfg.n_mels = 8;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> sig(200);
  for (float& v : sig) v = u(rng);
  const Matrix mags = LinearSpectrogram(sig, cfg);
  const auto hann = HannWindow(cfg.win);
  for (std::size_t t = 0; t < mags.rows(); ++t) {
    std::vector<double> frame(cfg.n_fft);
    CenteredFrame(sig, static_cast<long>(t) * cfg.hop, frame);
    for (int i = 0; i < cfg.n_fft; ++i) {
      const int j = i - (cfg.n_fft - cfg.win) / 2;
      frame[i] *= (j >= 0 && j < cfg.win) ? hann[j] : 0.0;
    }
    const auto ref = testing::NaiveDft(frame);
    for (std::size_t k = 0; k < ref.size(); ++k) {
      EXPECT_NEAR(mags(t, k), std::sqrt(std::norm(ref[k]) + kMagnitudeEps), 1e-4);
    }
  }
}

TEST(SpectrogramTest, SilenceHitsTheLogFloor) {
  const AudioConfig cfg;
  const MelSpectrogram mel = ComputeMel({std::vector<float>(2048, 0.0f), 24000}, cfg);
  for (float v : mel.values.data()) EXPECT_FLOAT_EQ(v, std::log(kMelFloor));
}

TEST(SpectrogramTest, ToneEnergyPeaksAtNearestFilter) {
  const AudioConfig cfg;
  const double f = 1000.0;
  Waveform w{std::vector<float>(12000), 24000};
  for (std::size_t i = 0; i < w.size(); ++i) {
    w.samples[i] = 0.5f * std::sin(2.0 * std::numbers::pi * f * i / 24000.0);
  }
  const MelSpectrogram mel = ComputeMel(w, cfg);
  const auto centers = MelCenterFrequencies(cfg);
  const auto row = mel.values.row(mel.frames() / 2);
  const int peak = std::max_element(row.begin(), row.end()) - row.begin();
  EXPECT_LT(std::abs(centers[peak] - f), 60.0);
}

TEST(SpectrogramTest, RejectsRateMismatchAndMeasuresDistance) {
  const AudioConfig cfg;
  EXPECT_THROW(ComputeMel({std::vector<float>(100), 16000}, cfg), Error);
  MelSpectrogram a, b;
  a.values = Matrix(3, 2, 1.0f);
  b.values = Matrix(4, 2, 0.5f);
  EXPECT_DOUBLE_EQ(MelL1Distance(a, b), 0.5);
  EXPECT_DOUBLE_EQ(MelL1Distance(a, a), 0.0);
}

}  // namespace
}  // namespace singshift
