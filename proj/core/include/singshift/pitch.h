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

#ifndef SINGSHIFT_PITCH_H_
#define SINGSHIFT_PITCH_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "singshift/audio.h"
#include "singshift/config.h"

namespace singshift {

// Frame-aligned pitch track. Unvoiced frames carry f0 == 0.
struct F0Contour {
  std::vector<double> f0_hz;
  std::vector<bool> voiced;
  int hop = 256;
  int sample_rate = 24000;

  std::size_t frames() const { return f0_hz.size(); }
  std::size_t VoicedCount() const;
  // Throws kArgument unless f0 > 0 exactly on voiced frames.
  void Validate() const;
  void Truncate(std::size_t frames);

  static F0Contour FromHz(std::vector<double> hz, int hop, int sample_rate);
};

struct PitchCandidate {
  double frequency_hz = 0.0;
  double probability = 0.0;
};

// Per-frame candidates; 1 - sum(probability) is the unvoiced mass.
using PitchCandidateSet = std::vector<std::vector<PitchCandidate>>;

// Squared-difference function d(tau) over an integration window of half the
// frame, for tau in [0, tau_max).
std::vector<double> YinDifference(std::span<const double> frame, int tau_max);

// Same window length, but for each tau the compared pair x[j], x[j + tau]
// is centered on the middle of the frame, so every lag measures the period
// at the frame center.
std::vector<double> CenteredYinDifference(std::span<const double> frame, int tau_max);

// Cumulative-mean-normalized d'(tau). d'(0) = 1, and d' = 1 wherever the
// running sum is zero (a flat frame is treated as aperiodic).
std::vector<double> CumulativeMeanNormalized(std::span<const double> diff);

// Beta(a, b) prior mass for each of the n thresholds k/n, k = 1..n.
std::vector<double> ThresholdPrior(const PitchConfig& cfg);

// One frame's probabilistic-YIN candidates, merged by lag. Candidates
// outside [cfg.fmin, cfg.fmax] are dropped and their mass becomes unvoiced.
std::vector<PitchCandidate> PyinCandidates(std::span<const double> frame,
                                           int sample_rate,
                                           const PitchConfig& cfg);

// Pitch HMM over B 20-cent bins (cfg.bin_cents) with a voiced and an
// unvoiced state per bin. State index b is voiced bin b, B + b unvoiced.
class PitchHmm {
 public:
  explicit PitchHmm(const PitchConfig& cfg);

  int bins() const { return bins_; }
  int states() const { return 2 * bins_; }
  double BinFrequency(int bin) const;
  int NearestBin(double hz) const;

  // Emission probabilities over all states for one frame.
  std::vector<double> Observation(const std::vector<PitchCandidate>& cands) const;
  // log P(to | from); -inf outside the jump window.
  double LogTransition(int from, int to) const;
  double LogInitial() const;

  // Most probable state sequence.
  std::vector<int> Decode(const std::vector<std::vector<double>>& observations) const;
  double PathLogScore(const std::vector<std::vector<double>>& observations,
                      std::span<const int> path) const;

 private:
  PitchConfig cfg_;
  int bins_;
  std::vector<double> log_jump_;  // indexed by |from - to|
  double log_stay_;
  double log_switch_;
};

// HMM smoothing of candidate sets into a contour. Voiced frames report the
// candidate nearest the chosen bin (within one bin), else the bin center.
F0Contour PyinViterbi(const PitchCandidateSet& cands, const PitchConfig& cfg,
                      int hop, int sample_rate);

// Candidates for every analysis frame (frame t centered on t * hop).
PitchCandidateSet AnalyzeCandidates(const Waveform& wave, const PitchConfig& cfg,
                                    int hop);

// Full tracker: ceil(len / hop) frames, aligned with the mel spectrogram.
F0Contour EstimateF0(const Waveform& wave, const PitchConfig& pitch, int hop);

// Mean of f0 over voiced frames; 0 when nothing is voiced.
double MeanVoicedF0(const F0Contour& contour);

// Tab-separated "frame  f0_hz  voiced" with a header row.
void WriteF0Text(const F0Contour& contour, const std::filesystem::path& path);

}  // namespace singshift

#endif  // SINGSHIFT_PITCH_H_
