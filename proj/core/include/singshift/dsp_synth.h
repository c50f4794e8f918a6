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

#ifndef SINGSHIFT_DSP_SYNTH_H_
#define SINGSHIFT_DSP_SYNTH_H_

#include <cstdint>

#include "singshift/audio.h"
#include "singshift/config.h"
#include "singshift/matrix.h"
#include "singshift/mel.h"
#include "singshift/pitch.h"

namespace singshift {

// Source-filter resynthesis used as the post-processor's conditioning path.
struct DspSynthOutput {
  Waveform waveform;  // harmonic + noise, sample-wise
  Waveform harmonic;
  Waveform noise;
};

struct DspSynthOptions {
  int harmonics = 64;
  double amplitude = 0.1;
  std::uint64_t noise_seed = 99;
  bool normalize = true;
  double peak = 0.95;
  double silence_threshold = 1e-2;

  static DspSynthOptions From(const PipelineConfig& cfg) {
    return {cfg.postproc.dsp_harmonics, cfg.excitation.amplitude,
            cfg.postproc.noise_seed,    true,
            cfg.postproc.peak,          cfg.postproc.silence_threshold};
  }
};

// (n_fft/2 + 1) x n_mels Moore-Penrose pseudo-inverse of the filterbank.
Matrix MelPseudoInverse(const AudioConfig& cfg);

// Linear-frequency magnitude envelope per frame: pinv(M) exp(mel), >= 0.
Matrix MelToLinearEnvelope(const MelSpectrogram& mel, const AudioConfig& cfg);

// Harmonic excitation and gated white noise, each shaped frame by frame by
// the envelope through FFT multiplication and overlap-add. Output length is
// frames * hop. With `normalize`, the sum is scaled to `peak` unless its
// peak is below `silence_threshold`.
DspSynthOutput DspSynthesize(const MelSpectrogram& mel, const F0Contour& f0,
                             const AudioConfig& cfg, const DspSynthOptions& opts);

}  // namespace singshift

#endif  // SINGSHIFT_DSP_SYNTH_H_
