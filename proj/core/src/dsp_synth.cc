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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "singshift/error.h"
#include "singshift/excitation.h"
#include "singshift/fft.h"

namespace singshift {

Matrix MelPseudoInverse(const AudioConfig& cfg) {
  const Matrix fb = MelFilterbank(cfg);
  Eigen::MatrixXd m(fb.rows(), fb.cols());
  for (std::size_t r = 0; r < fb.rows(); ++r) {
    for (std::size_t c = 0; c < fb.cols(); ++c) m(r, c) = fb(r, c);
  }
  const Eigen::MatrixXd pinv =
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(m).pseudoInverse();
  Matrix out(pinv.rows(), pinv.cols());
  for (Eigen::Index r = 0; r < pinv.rows(); ++r) {
    for (Eigen::Index c = 0; c < pinv.cols(); ++c) {
      out(r, c) = static_cast<float>(pinv(r, c));
    }
  }
  return out;
}

Matrix MelToLinearEnvelope(const MelSpectrogram& mel, const AudioConfig& cfg) {
  const Matrix pinv = MelPseudoInverse(cfg);
  const std::size_t bins = pinv.rows();
  Matrix env(mel.frames(), bins);
  std::vector<double> lin(mel.values.cols());
  for (std::size_t t = 0; t < mel.frames(); ++t) {
    for (std::size_t m = 0; m < lin.size(); ++m) lin[m] = std::exp(mel.values(t, m));
    for (std::size_t k = 0; k < bins; ++k) {
      double acc = 0.0;
      const auto row = pinv.row(k);
      for (std::size_t m = 0; m < lin.size(); ++m) acc += double(row[m]) * lin[m];
      env(t, k) = static_cast<float>(std::max(acc, 0.0));
    }
  }
  return env;
}

namespace {

// Frame-wise zero-phase filtering by `gain` (frames x bins), overlap-added
// and normalized by the summed analysis window.
std::vector<float> ShapeByEnvelope(const std::vector<float>& signal,
                                   const Matrix& gain, const AudioConfig& cfg) {
  const long len = static_cast<long>(signal.size());
  const int n_fft = cfg.n_fft;
  std::vector<double> window(n_fft, 0.0);
  const auto hann = HannWindow(cfg.win);
  std::copy(hann.begin(), hann.end(), window.begin() + (n_fft - cfg.win) / 2);

  RealFft fft(n_fft);
  std::vector<double> frame(n_fft), back(n_fft);
  std::vector<std::complex<double>> spec(fft.bins());
  std::vector<double> acc(len, 0.0), norm(len, 0.0);
  for (std::size_t t = 0; t < gain.rows(); ++t) {
    const long start = static_cast<long>(t) * cfg.hop - n_fft / 2;
    for (int i = 0; i < n_fft; ++i) {
      const long n = start + i;
      frame[i] = (n >= 0 && n < len) ? signal[n] * window[i] : 0.0;
    }
    fft.Forward(frame, spec);
    const auto g = gain.row(t);
    for (int k = 0; k < fft.bins(); ++k) spec[k] *= g[k];
    fft.Inverse(spec, back);
    for (int i = 0; i < n_fft; ++i) {
      const long n = start + i;
      if (n < 0 || n >= len) continue;
      acc[n] += back[i] / n_fft;
      norm[n] += window[i];
    }
  }
  std::vector<float> out(len, 0.0f);
  for (long n = 0; n < len; ++n) {
    out[n] = norm[n] > 1e-8 ? static_cast<float>(acc[n] / norm[n]) : 0.0f;
  }
  return out;
}

}  // namespace

DspSynthOutput DspSynthesize(const MelSpectrogram& mel, const F0Contour& f0,
                             const AudioConfig& cfg, const DspSynthOptions& opts) {
  if (mel.frames() != f0.frames()) {
    throw Error(ErrorCode::kAlignment, "mel and f0 frame counts differ");
  }
  const std::size_t frames = mel.frames();
  const std::size_t len = frames * cfg.hop;
  DspSynthOutput out;
  for (Waveform* w : {&out.waveform, &out.harmonic, &out.noise}) {
    w->sample_rate = cfg.sample_rate;
    w->samples.assign(len, 0.0f);
  }
  if (frames == 0) return out;

  const Matrix env = MelToLinearEnvelope(mel, cfg);

  // A sinusoid of amplitude a gives |X| = a * sum(w) / 2 = a * win / 4, and
  // unit white noise gives |X| ~ sqrt(sum(w^2)) = sqrt(3 win / 8).
  const double harmonic_gain = 4.0 / (cfg.win * std::max(opts.amplitude, 1e-12));
  const double noise_gain = 1.0 / std::sqrt(3.0 * cfg.win / 8.0);
  Matrix hgain(env.rows(), env.cols()), ngain(env.rows(), env.cols());
  for (std::size_t i = 0; i < env.data().size(); ++i) {
    hgain.data()[i] = static_cast<float>(env.data()[i] * harmonic_gain);
    ngain.data()[i] = static_cast<float>(env.data()[i] * noise_gain);
  }

  const auto f0_samples = UpsampleF0(f0, len);
  ExcitationParams params{opts.amplitude, 0.0, opts.harmonics, opts.noise_seed};
  auto source = SineExcitation(f0_samples, cfg.sample_rate, params).samples;
  for (std::size_t n = 0; n < len; ++n) {
    if (f0_samples[n] <= 0.0f) source[n] = 0.0f;
  }

  std::mt19937_64 rng(opts.noise_seed ^ 0x9E3779B97F4A7C15ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<float> noise(len);
  for (std::size_t n = 0; n < len; ++n) {
    const std::size_t t = std::min(n / cfg.hop, frames - 1);
    const double g = gauss(rng);
    noise[n] = f0.voiced[t] ? 0.0f : static_cast<float>(g);
  }

  out.harmonic.samples = ShapeByEnvelope(source, hgain, cfg);
  out.noise.samples = ShapeByEnvelope(noise, ngain, cfg);

  double peak = 0.0;
  for (std::size_t n = 0; n < len; ++n) {
    out.waveform.samples[n] = out.harmonic.samples[n] + out.noise.samples[n];
    peak = std::max(peak, std::abs(static_cast<double>(out.waveform.samples[n])));
  }
  if (opts.normalize && peak >= opts.silence_threshold) {
    const float scale = static_cast<float>(opts.peak / peak);
    for (Waveform* w : {&out.waveform, &out.harmonic, &out.noise}) {
      for (auto& s : w->samples) s *= scale;
    }
    // Keep waveform == harmonic + noise exactly after scaling.
    for (std::size_t n = 0; n < len; ++n) {
      out.waveform.samples[n] = out.harmonic.samples[n] + out.noise.samples[n];
    }
  }
  return out;
}

}  // namespace singshift
