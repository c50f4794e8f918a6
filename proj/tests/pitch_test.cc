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

#include "singshift/pitch.h"

#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "singshift/error.h"
#include "singshift/toy_corpus.h"
#include "support/test_util.h"

namespace singshift {
namespace {

constexpr int kRate = 24000;
constexpr int kHop = 256;

std::vector<double> Sine(double f, std::size_t n, double amp = 0.5) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amp * std::sin(2.0 * std::numbers::pi * f * i / kRate);
  }
  return x;
}

TEST(YinTest, DifferenceMatchesDefinition) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> x(64);
  for (double& v : x) v = g(rng);
  const auto d = YinDifference(x, 20);
  ASSERT_EQ(d.size(), 20u);
  EXPECT_EQ(d[0], 0.0);
  for (int tau = 1; tau < 20; ++tau) {
    double acc = 0.0;
    for (int j = 0; j < 32; ++j) acc += (x[j] - x[j + tau]) * (x[j] - x[j + tau]);
    EXPECT_NEAR(d[tau], acc, 1e-9);
  }
  const auto c = CumulativeMeanNormalized(d);
  EXPECT_EQ(c[0], 1.0);
  double running = 0.0;
  for (int tau = 1; tau < 20; ++tau) {
    running += d[tau];
    EXPECT_NEAR(c[tau], d[tau] * tau / running, 1e-12);
  }
  EXPECT_THROW(YinDifference(x, 40), Error);

  const auto centered = CenteredYinDifference(x, 20);
  for (int tau = 1; tau < 20; ++tau) {
    const int start = (64 - 32 - tau) / 2;
    double acc = 0.0;
    for (int j = start; j < start + 32; ++j) acc += (x[j] - x[j + tau]) * (x[j] - x[j + tau]);
    EXPECT_NEAR(centered[tau], acc, 1e-9);
  }
}

TEST(YinTest, PeriodicFrameDipsAtPeriod) {
  std::vector<double> x(1024);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * i / 50.0);
  const auto c = CumulativeMeanNormalized(YinDifference(x, 120));
  EXPECT_LT(c[50], 0.05);
  EXPECT_LT(c[100], 0.05);
}

TEST(YinTest, WhiteNoiseStaysAperiodic) {
  int above = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> x(1024);
    for (double& v : x) v = g(rng);
    const auto c = CumulativeMeanNormalized(YinDifference(x, 372));
    above += *std::min_element(c.begin() + 1, c.end()) > 0.3;
  }
  EXPECT_GE(above, 95);
}

TEST(YinTest, ConstantFrameIsDegenerate) {
  const std::vector<double> x(256, 0.7);
  const auto d = YinDifference(x, 100);
  for (double v : d) EXPECT_EQ(v, 0.0);
  for (double v : CumulativeMeanNormalized(d)) EXPECT_EQ(v, 1.0);
}

TEST(PyinTest, ThresholdPriorMatchesIntegratedBetaDensity) {
  const PitchConfig cfg;
  const auto prior = ThresholdPrior(cfg);
  ASSERT_EQ(prior.size(), 100u);
  const double norm = boost::math::beta(cfg.beta_a, cfg.beta_b);
  auto pdf = [&](double x) {
    return std::pow(x, cfg.beta_a - 1) * std::pow(1 - x, cfg.beta_b - 1) / norm;
  };
  double total = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double a = k / 100.0, b = (k + 1) / 100.0;
    const int n = 64;
    const double h = (b - a) / n;
    double s = pdf(a) + pdf(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * pdf(a + i * h);
    EXPECT_NEAR(prior[k], s * h / 3.0, 1e-10) << "bin " << k;
    total += prior[k];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(PyinTest, SineFrameYieldsOneDominantCandidate) {
  const PitchConfig cfg;
  const auto cands = PyinCandidates(Sine(220.0, 1024), kRate, cfg);
  ASSERT_FALSE(cands.empty());
  const auto best = std::max_element(cands.begin(), cands.end(), [](auto& a, auto& b) {
    return a.probability < b.probability;
  });
  EXPECT_LT(std::abs(testing::Cents(best->frequency_hz, 220.0)), 20.0);
  EXPECT_GE(best->probability, 0.9);
  for (const auto& c : cands) {
    if (std::abs(testing::Cents(c.frequency_hz, 110.0)) < 50.0 ||
        std::abs(testing::Cents(c.frequency_hz, 440.0)) < 50.0) {
      EXPECT_LE(c.probability, 0.1);
    }
    EXPECT_GE(c.frequency_hz, cfg.fmin);
    EXPECT_LE(c.frequency_hz, cfg.fmax);
  }
}

TEST(PyinTest, SilenceFrameHasNoCandidates) {
  EXPECT_TRUE(PyinCandidates(std::vector<double>(1024, 0.0), kRate, PitchConfig{}).empty());
}

TEST(PitchHmmTest, BinsAreSpacedTwentyCents) {
  const PitchHmm hmm{PitchConfig{}};
  EXPECT_EQ(hmm.bins(), 245);
  EXPECT_EQ(hmm.states(), 490);
  for (int b = 1; b < hmm.bins(); ++b) {
    EXPECT_NEAR(testing::Cents(hmm.BinFrequency(b), hmm.BinFrequency(b - 1)), 20.0, 1e-9);
  }
  EXPECT_EQ(hmm.NearestBin(65.0), 0);
  EXPECT_EQ(hmm.NearestBin(hmm.BinFrequency(37) * 1.002), 37);
  EXPECT_EQ(hmm.NearestBin(5000.0), hmm.bins() - 1);
}

TEST(PitchHmmTest, TransitionsAreNormalizedTriangles) {
  PitchConfig cfg;
  cfg.fmin = 100.0;
  cfg.fmax = 400.0;
  cfg.max_jump_bins = 5;
  const PitchHmm hmm(cfg);
  for (int from : {0, 30, hmm.bins() + 30}) {
    double total = 0.0;
    for (int to = 0; to < hmm.states(); ++to) {
      const double lp = hmm.LogTransition(from, to);
      if (std::isfinite(lp)) total += std::exp(lp);
    }
    // Interior rows integrate to one; the edge row loses the clipped tail.
    if (from % hmm.bins() >= cfg.max_jump_bins) {
      EXPECT_NEAR(total, 1.0, 1e-12);
    } else {
      EXPECT_LT(total, 1.0);
    }
  }
  EXPECT_TRUE(std::isinf(hmm.LogTransition(0, 6)));
  EXPECT_GT(hmm.LogTransition(10, 10), hmm.LogTransition(10, 12));
  EXPECT_GT(hmm.LogTransition(10, 12), hmm.LogTransition(10, hmm.bins() + 12));
}

TEST(PitchHmmTest, ViterbiMatchesExhaustiveSearch) {
  PitchConfig cfg;
  cfg.fmin = 100.0;
  cfg.fmax = 104.0;
  cfg.max_jump_bins = 2;
  cfg.switch_prob = 0.2;
  const PitchHmm hmm(cfg);
  ASSERT_EQ(hmm.bins(), 4);
  const int n = hmm.states();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int frames = 5;
    std::vector<std::vector<double>> obs(frames, std::vector<double>(n));
    for (auto& row : obs) {
      for (double& v : row) v = u(rng) * u(rng);
    }
    const auto path = hmm.Decode(obs);
    ASSERT_EQ(path.size(), 5u);
    const double decoded = hmm.PathLogScore(obs, path);

    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> p(frames);
    for (int code = 0; code < n * n * n * n * n; ++code) {
      int c = code;
      for (int t = 0; t < frames; ++t, c /= n) p[t] = c % n;
      best = std::max(best, hmm.PathLogScore(obs, p));
    }
    EXPECT_NEAR(decoded, best, 1e-9);

    std::vector<int> greedy(frames);
    for (int t = 0; t < frames; ++t) {
      greedy[t] = std::max_element(obs[t].begin(), obs[t].end()) - obs[t].begin();
    }
    EXPECT_GE(decoded, hmm.PathLogScore(obs, greedy));
  }
}

TEST(PyinViterbiTest, EmptyInputGivesEmptyContour) {
  EXPECT_EQ(PyinViterbi({}, PitchConfig{}, kHop, kRate).frames(), 0u);
}

void ExpectContourInvariant(const F0Contour& c, const PitchConfig& cfg) {
  EXPECT_NO_THROW(c.Validate());
  for (std::size_t t = 0; t < c.frames(); ++t) {
    if (!c.voiced[t]) continue;
    EXPECT_GE(c.f0_hz[t], cfg.fmin * 0.99);
    EXPECT_LE(c.f0_hz[t], cfg.fmax * 1.01);
  }
}

TEST(PyinViterbiTest, ConstantToneIsTrackedWithinTenCents) {
  const PitchConfig cfg;
  Waveform w{std::vector<float>(kRate), kRate};
  const auto s = Sine(440.0, kRate);
  std::copy(s.begin(), s.end(), w.samples.begin());
  const F0Contour c = EstimateF0(w, cfg, kHop);
  ExpectContourInvariant(c, cfg);
  const auto stats =
      testing::PitchErrors(c.f0_hz, c.voiced, [](std::size_t) { return 440.0; });
  EXPECT_EQ(stats.voiced, stats.frames);
  EXPECT_LE(stats.median_cents, 10.0);
  EXPECT_NEAR(MeanVoicedF0(c), 440.0, 5.0);
}

TEST(PyinViterbiTest, SawtoothsAcrossTheRange) {
  const PitchConfig cfg;
  for (double f : {80.0, 110.0, 220.0, 440.0, 800.0, 880.0}) {
    const F0Contour c = EstimateF0(Sawtooth(f, 1.0, kRate), cfg, kHop);
    ExpectContourInvariant(c, cfg);
    const auto stats = testing::PitchErrors(c.f0_hz, c.voiced, [&](std::size_t) { return f; });
    EXPECT_LE(stats.median_cents, 10.0) << f;
    EXPECT_LE(stats.gross_rate, 0.05) << f;
    EXPECT_GT(stats.voiced, stats.frames * 9 / 10) << f;
  }
}

TEST(PyinViterbiTest, GlideFollowsInstantaneousFrequency) {
  const PitchConfig cfg;
  const Waveform w = SawtoothGlide(220.0, 440.0, 1.0, kRate);
  const F0Contour c = EstimateF0(w, cfg, kHop);
  ExpectContourInvariant(c, cfg);
  const double n = static_cast<double>(w.size());
  const auto stats = testing::PitchErrors(c.f0_hz, c.voiced, [&](std::size_t t) {
    const double i = std::min<double>(t * kHop, n - 1);
    return 220.0 * std::exp(std::log(2.0) * i / (n - 1));
  });
  EXPECT_LE(stats.gross_rate, 0.05);
  EXPECT_LE(stats.median_cents, 10.0);
}

TEST(PyinViterbiTest, SilenceIsUnvoiced) {
  const F0Contour c = EstimateF0(Silence(1.0, kRate), PitchConfig{}, kHop);
  EXPECT_EQ(c.frames(), 94u);
  EXPECT_EQ(c.VoicedCount(), 0u);
  EXPECT_EQ(MeanVoicedF0(c), 0.0);
}

TEST(F0ContourTest, MeanAndValidation) {
  const F0Contour c = F0Contour::FromHz({200.0, 0.0, 300.0, -5.0, 400.0}, kHop, kRate);
  EXPECT_EQ(c.VoicedCount(), 3u);
  EXPECT_DOUBLE_EQ(MeanVoicedF0(c), 300.0);
  EXPECT_NO_THROW(c.Validate());
  F0Contour bad = c;
  bad.voiced[1] = true;
  EXPECT_THROW(bad.Validate(), Error);
  bad = c;
  bad.voiced.pop_back();
  EXPECT_THROW(bad.Validate(), Error);
  F0Contour t = c;
  t.Truncate(2);
  EXPECT_EQ(t.frames(), 2u);
}

TEST(F0ContourTest, TextExport) {
  testing::TempDir dir;
  WriteF0Text(F0Contour::FromHz({110.5, 0.0}, kHop, kRate), dir / "f0.txt");
  std::ifstream in(dir / "f0.txt");
  std::string header, a, b;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  EXPECT_EQ(header, "frame\tf0_hz\tvoiced");
  EXPECT_EQ(a, "0\t110.500000\t1");
  EXPECT_EQ(b, "1\t0.000000\t0");
}

}  // namespace
}  // namespace singshift
