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

#ifndef SINGSHIFT_EXCITATION_H_
#define SINGSHIFT_EXCITATION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "singshift/config.h"
#include "singshift/pitch.h"

namespace singshift {

struct ExcitationParams {
  double amplitude = 0.1;
  double sigma = 0.003;
  int harmonics = 8;
  std::uint64_t seed = 0;

  static ExcitationParams From(const ExcitationConfig& cfg) {
    return {cfg.amplitude, cfg.sigma, cfg.harmonics, cfg.seed};
  }
};

struct ExcitationSignal {
  std::vector<float> samples;
  int harmonics = 0;
  double amplitude = 0.0;
  double sigma = 0.0;
};

// Frame-rate f0 to sample rate: frame t covers samples [t*hop, (t+1)*hop).
// Values are held per frame and linearly crossfaded over `crossfade`
// samples around boundaries between two voiced frames. Unvoiced samples are 0.
// Samples past the last frame hold its value.
std::vector<float> UpsampleF0(const F0Contour& contour, std::size_t target_len,
                              int crossfade = 16);

// Harmonic sine train plus Gaussian noise:
//   voiced:   sum_h (A/h) sin(phi_h) + sigma * g,  harmonics with h*f0 >= fs/2 skipped
//   unvoiced: (A/3) * g
// One phase accumulator per harmonic runs across the whole signal.
ExcitationSignal SineExcitation(std::span<const float> f0_per_sample,
                                int sample_rate, const ExcitationParams& params);

}  // namespace singshift

#endif  // SINGSHIFT_EXCITATION_H_
