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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "singshift/error.h"
#include "singshift/fft.h"

namespace singshift {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

namespace {

std::vector<double> MelEdges(const AudioConfig& cfg) {
  const double lo = HzToMel(cfg.fmin);
  const double hi = HzToMel(cfg.fmax);
  std::vector<double> edges(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    edges[i] = MelToHz(lo + (hi - lo) * i / (cfg.n_mels + 1));
  }
  return edges;
}

}  // namespace

std::vector<double> MelCenterFrequencies(const AudioConfig& cfg) {
  const auto edges = MelEdges(cfg);
  return {edges.begin() + 1, edges.end() - 1};
}

Matrix MelFilterbank(const AudioConfig& cfg) {
  const int bins = cfg.n_fft / 2 + 1;
  const auto edges = MelEdges(cfg);
  Matrix fb(cfg.n_mels, bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    const double norm = 2.0 / (right - left);
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft;
      double w = 0.0;
      if (f > left && f <= center) {
        w = (f - left) / (center - left);
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      fb(m, k) = static_cast<float>(w * norm);
    }
  }
  return fb;
}

std::vector<double> HannWindow(int win) {
  std::vector<double> w(win);
  for (int i = 0; i < win; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / win);
  }
  return w;
}

std::size_t AnalysisFrameCount(std::size_t len, int hop) {
  return (len + hop - 1) / hop;
}

void CenteredFrame(std::span<const float> signal, long center,
                   std::span<double> out) {
  const long n = static_cast<long>(out.size());
  const long len = static_cast<long>(signal.size());
  const long start = center - n / 2;
  for (long i = 0; i < n; ++i) {
    long j = start + i;
    if (j < 0) j = -j;
    if (j >= len) j = 2 * (len - 1) - j;
    out[i] = (j >= 0 && j < len) ? signal[j] : 0.0;
  }
}

Matrix LinearSpectrogram(std::span<const float> signal, const AudioConfig& cfg) {
  const std::size_t frames = AnalysisFrameCount(signal.size(), cfg.hop);
  const int bins = cfg.n_fft / 2 + 1;
  Matrix mags(frames, bins);
  if (frames == 0) return mags;

  std::vector<double> window(cfg.n_fft, 0.0);
  const auto hann = HannWindow(cfg.win);
  const int offset = (cfg.n_fft - cfg.win) / 2;
  std::copy(hann.begin(), hann.end(), window.begin() + offset);

  RealFft fft(cfg.n_fft);
  std::vector<double> frame(cfg.n_fft);
  std::vector<std::complex<double>> spec(bins);
  for (std::size_t t = 0; t < frames; ++t) {
    CenteredFrame(signal, static_cast<long>(t) * cfg.hop, frame);
    for (int i = 0; i < cfg.n_fft; ++i) frame[i] *= window[i];
    fft.Forward(frame, spec);
    for (int k = 0; k < bins; ++k) {
      mags(t, k) = static_cast<float>(std::sqrt(std::norm(spec[k]) + kMagnitudeEps));
    }
  }
  return mags;
}

MelSpectrogram MelFromMagnitudes(const Matrix& magnitudes, const AudioConfig& cfg) {
  const Matrix fb = MelFilterbank(cfg);
  if (!magnitudes.empty() && magnitudes.cols() != fb.cols()) {
    throw Error(ErrorCode::kDimension, "magnitude bins do not match n_fft");
  }
  MelSpectrogram mel;
  mel.hop = cfg.hop;
  mel.sample_rate = cfg.sample_rate;
  mel.values = Matrix(magnitudes.rows(), cfg.n_mels);
  for (std::size_t t = 0; t < magnitudes.rows(); ++t) {
    const auto mag = magnitudes.row(t);
    for (int m = 0; m < cfg.n_mels; ++m) {
      const auto filt = fb.row(m);
      double acc = 0.0;
      for (std::size_t k = 0; k < filt.size(); ++k) acc += double(filt[k]) * mag[k];
      mel.values(t, m) =
          static_cast<float>(std::log(std::max(acc, static_cast<double>(kMelFloor))));
    }
  }
  return mel;
}

MelSpectrogram ComputeMel(const Waveform& wave, const AudioConfig& cfg) {
  if (wave.sample_rate != cfg.sample_rate) {
    throw Error(ErrorCode::kArgument,
                "waveform rate " + std::to_string(wave.sample_rate) +
                    " does not match configured " + std::to_string(cfg.sample_rate));
  }
  return MelFromMagnitudes(LinearSpectrogram(wave.samples, cfg), cfg);
}

double MelL1Distance(const MelSpectrogram& a, const MelSpectrogram& b) {
  const std::size_t frames = std::min(a.frames(), b.frames());
  const std::size_t cols = std::min(a.values.cols(), b.values.cols());
  if (frames == 0 || cols == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t m = 0; m < cols; ++m) {
      acc += std::abs(a.values(t, m) - b.values(t, m));
    }
  }
  return acc / static_cast<double>(frames * cols);
}

}  // namespace singshift
