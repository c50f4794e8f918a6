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

#include "singshift/dsp_synth.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "singshift/error.h"
#include "singshift/mel.h"
#include "singshift/pitch.h"
#include "singshift/toy_corpus.h"
#include "support/test_util.h"

namespace singshift {
namespace {

constexpr int kRate = 24000;

DspSynthOptions Raw() {
  DspSynthOptions o;
  o.normalize = false;
  return o;
}

// Sum of a few positive Gaussian bumps across the linear bins.
Matrix SmoothEnvelopes(std::size_t frames, int bins, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(0.0, bins), width(20.0, 120.0), gain(0.1, 2.0);
  Matrix m(frames, bins);
  for (std::size_t t = 0; t < frames; ++t) {
    for (int j = 0; j < 4; ++j) {
      const double c = center(rng), w = width(rng), g = gain(rng);
      for (int k = 0; k < bins; ++k) {
        m(t, k) += static_cast<float>(g * std::exp(-0.5 * (k - c) * (k - c) / (w * w)));
      }
    }
    for (int k = 0; k < bins; ++k) m(t, k) += 0.01f;
  }
  return m;
}

TEST(MelInversionTest, PseudoInverseReproducesTheMel) {
  const AudioConfig cfg;
  const Matrix pinv = MelPseudoInverse(cfg);
  EXPECT_EQ(pinv.rows(), 513u);
  EXPECT_EQ(pinv.cols(), 80u);
  const MelSpectrogram mel = MelFromMagnitudes(SmoothEnvelopes(20, 513, 5), cfg);
  const Matrix env = MelToLinearEnvelope(mel, cfg);
  for (float v : env.data()) EXPECT_GE(v, 0.0f);
  EXPECT_LE(MelL1Distance(MelFromMagnitudes(env, cfg), mel), 0.1);
}

TEST(DspSynthTest, LengthSumIdentityAndAlignment) {
  const AudioConfig cfg;
  const Waveform saw = Sawtooth(220.0, 0.5, kRate);
  const MelSpectrogram mel = ComputeMel(saw, cfg);
  F0Contour f0 = F0Contour::FromHz(std::vector<double>(mel.frames(), 220.0), cfg.hop, kRate);
  for (std::size_t t = 0; t < 10; ++t) {
    f0.f0_hz[t] = 0.0;
    f0.voiced[t] = false;
  }
  const DspSynthOutput out = DspSynthesize(mel, f0, cfg, DspSynthOptions{});
  ASSERT_EQ(out.waveform.size(), mel.frames() * cfg.hop);
  ASSERT_EQ(out.harmonic.size(), out.waveform.size());
  double peak = 0.0;
  for (std::size_t n = 0; n < out.waveform.size(); ++n) {
    EXPECT_EQ(out.waveform.samples[n], out.harmonic.samples[n] + out.noise.samples[n]);
    peak = std::max<double>(peak, std::abs(out.waveform.samples[n]));
  }
  EXPECT_NEAR(peak, 0.95, 1e-3);
  f0.Truncate(mel.frames() - 4);
  EXPECT_THROW(DspSynthesize(mel, f0, cfg, DspSynthOptions{}), Error);
  EXPECT_EQ(DspSynthesize(MelSpectrogram{}, F0Contour{}, cfg, Raw()).waveform.size(), 0u);
}

TEST(DspSynthTest, EnergyScalesLinearlyWithEnvelope) {
  const AudioConfig cfg;
  const MelSpectrogram mel = ComputeMel(HarmonicTone(180.0, 0.5, kRate, 10), cfg);
  MelSpectrogram louder = mel;
  for (float& v : louder.values.data()) v += static_cast<float>(std::log(2.0));
  F0Contour f0 = F0Contour::FromHz(std::vector<double>(mel.frames(), 180.0), cfg.hop, kRate);
  for (std::size_t t = 0; t < f0.frames(); t += 3) {
    f0.f0_hz[t] = 0.0;
    f0.voiced[t] = false;
  }
  const auto a = DspSynthesize(mel, f0, cfg, Raw());
  const auto b = DspSynthesize(louder, f0, cfg, Raw());
  EXPECT_NEAR(testing::Rms(b.waveform.samples) / testing::Rms(a.waveform.samples), 2.0, 0.1);
}

TEST(DspSynthTest, UnvoicedFramesHaveNoHarmonicPart) {
  const AudioConfig cfg;
  const MelSpectrogram mel = ComputeMel(Sawtooth(200.0, 0.3, kRate), cfg);
  const F0Contour f0 = F0Contour::FromHz(std::vector<double>(mel.frames(), 0.0), cfg.hop, kRate);
  const auto out = DspSynthesize(mel, f0, cfg, Raw());
  for (float v : out.harmonic.samples) EXPECT_EQ(v, 0.0f);
  EXPECT_GT(testing::Rms(out.noise.samples), 0.0);
}

TEST(DspSynthTest, SilenceStaysSilent) {
  const AudioConfig cfg;
  const MelSpectrogram mel = ComputeMel(Silence(0.5, kRate), cfg);
  const F0Contour f0 = F0Contour::FromHz(std::vector<double>(mel.frames(), 0.0), cfg.hop, kRate);
  const auto out = DspSynthesize(mel, f0, cfg, DspSynthOptions{});
  for (float v : out.waveform.samples) {
    ASSERT_TRUE(std::isfinite(v));
    EXPECT_LT(std::abs(v), 1e-2f);
  }
}

TEST(DspSynthTest, ResynthesizedSawtoothKeepsItsPitch) {
  const AudioConfig cfg;
  const PitchConfig pitch;
  const MelSpectrogram mel = ComputeMel(Sawtooth(220.0, 1.0, kRate), cfg);
  const F0Contour f0 = F0Contour::FromHz(std::vector<double>(mel.frames(), 220.0), cfg.hop, kRate);
  const auto out = DspSynthesize(mel, f0, cfg, DspSynthOptions{});
  const F0Contour est = EstimateF0(out.waveform, pitch, cfg.hop);
  std::vector<double> voiced;
  for (std::size_t t = 0; t < est.frames(); ++t) {
    if (est.voiced[t]) voiced.push_back(est.f0_hz[t]);
  }
  ASSERT_GT(voiced.size(), est.frames() / 2);
  EXPECT_LT(std::abs(testing::Cents(testing::Median(voiced), 220.0)), 20.0);
  EXPECT_EQ(DspSynthesize(mel, f0, cfg, DspSynthOptions{}).waveform.samples,
            out.waveform.samples);
}

}  // namespace
}  // namespace singshift
