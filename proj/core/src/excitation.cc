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

#include "singshift/excitation.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "singshift/error.h"

namespace singshift {

std::vector<float> UpsampleF0(const F0Contour& contour, std::size_t target_len,
                              int crossfade) {
  std::vector<float> out(target_len, 0.0f);
  const std::size_t frames = contour.frames();
  if (frames == 0 || target_len == 0) return out;
  const std::size_t hop = static_cast<std::size_t>(contour.hop);

  for (std::size_t n = 0; n < target_len; ++n) {
    const std::size_t t = std::min(n / hop, frames - 1);
    out[n] = static_cast<float>(contour.f0_hz[t]);
  }
  if (crossfade <= 1) return out;

  const long half = crossfade / 2;
  for (std::size_t t = 1; t < frames; ++t) {
    if (!contour.voiced[t - 1] || !contour.voiced[t]) continue;
    const double a = contour.f0_hz[t - 1], b = contour.f0_hz[t];
    const long boundary = static_cast<long>(t * hop);
    for (long i = 0; i < crossfade; ++i) {
      const long n = boundary - half + i;
      if (n < 0 || n >= static_cast<long>(target_len)) continue;
      const double alpha = (i + 0.5) / crossfade;
      out[n] = static_cast<float>((1.0 - alpha) * a + alpha * b);
    }
  }
  return out;
}

ExcitationSignal SineExcitation(std::span<const float> f0_per_sample,
                                int sample_rate, const ExcitationParams& params) {
  if (sample_rate <= 0 || params.harmonics < 1) {
    throw Error(ErrorCode::kArgument, "bad excitation parameters");
  }
  ExcitationSignal sig;
  sig.harmonics = params.harmonics;
  sig.amplitude = params.amplitude;
  sig.sigma = params.sigma;
  sig.samples.resize(f0_per_sample.size());

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double nyquist = sample_rate / 2.0;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> phase(params.harmonics, 0.0);

  for (std::size_t n = 0; n < f0_per_sample.size(); ++n) {
    const double f0 = std::max(0.0, static_cast<double>(f0_per_sample[n]));
    const double noise = gauss(rng);
    double value = 0.0;
    for (int h = 1; h <= params.harmonics; ++h) {
      double& phi = phase[h - 1];
      phi = std::fmod(phi + two_pi * h * f0 / sample_rate, two_pi);
      if (f0 > 0.0 && h * f0 < nyquist) {
        value += params.amplitude / h * std::sin(phi);
      }
    }
    value += f0 > 0.0 ? params.sigma * noise : params.amplitude / 3.0 * noise;
    sig.samples[n] = static_cast<float>(value);
  }
  return sig;
}

}  // namespace singshift
