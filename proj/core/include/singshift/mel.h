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

#ifndef SINGSHIFT_MEL_H_
#define SINGSHIFT_MEL_H_

#include <cstddef>
#include <span>
#include <vector>

#include "singshift/audio.h"
#include "singshift/config.h"
#include "singshift/matrix.h"

namespace singshift {

// Magnitudes below this are floored before the log.
inline constexpr float kMelFloor = 1e-5f;
// Added to |X|^2 before the square root so the magnitude stays smooth at 0.
inline constexpr double kMagnitudeEps = 1e-9;

struct MelSpectrogram {
  Matrix values;  // frames x n_mels, natural-log magnitudes
  int hop = 256;
  int sample_rate = 24000;

  std::size_t frames() const { return values.rows(); }
};

// HTK mel scale.
double HzToMel(double hz);
double MelToHz(double mel);

// Center frequency of every mel band, in Hz.
std::vector<double> MelCenterFrequencies(const AudioConfig& cfg);

// n_mels x (n_fft/2 + 1) triangular filters, each scaled to unit area
// in Hz (2 / bandwidth).
Matrix MelFilterbank(const AudioConfig& cfg);

// Periodic Hann window of length `win`.
std::vector<double> HannWindow(int win);

// Analysis frames for a signal of `len` samples: ceil(len / hop).
std::size_t AnalysisFrameCount(std::size_t len, int hop);

// n samples centered on `center`, reflecting at the edges and zero beyond
// one reflection.
void CenteredFrame(std::span<const float> signal, long center,
                   std::span<double> out);

// frames x (n_fft/2 + 1) STFT magnitudes: frame t is centered on t * hop,
// windowed by a Hann window of `win` samples centered inside n_fft.
Matrix LinearSpectrogram(std::span<const float> signal, const AudioConfig& cfg);

// log(max(M |X|, floor)). Empty input yields zero frames.
MelSpectrogram ComputeMel(const Waveform& wave, const AudioConfig& cfg);

MelSpectrogram MelFromMagnitudes(const Matrix& magnitudes, const AudioConfig& cfg);

// Mean absolute difference over the common frame count.
double MelL1Distance(const MelSpectrogram& a, const MelSpectrogram& b);

}  // namespace singshift

#endif  // SINGSHIFT_MEL_H_
