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

#ifndef SINGSHIFT_TOY_CORPUS_H_
#define SINGSHIFT_TOY_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "singshift/audio.h"
#include "singshift/keyshift.h"

namespace singshift {

// Band-limited sawtooth (harmonics below Nyquist, amplitudes 1/h).
Waveform Sawtooth(double f0, double seconds, int sample_rate, double amplitude = 0.5);

// Sawtooth whose frequency moves log-linearly from f_start to f_end.
Waveform SawtoothGlide(double f_start, double f_end, double seconds, int sample_rate,
                       double amplitude = 0.5);

// Sum of `harmonics` equal-amplitude sines at f0, peak-scaled to amplitude.
Waveform HarmonicTone(double f0, double seconds, int sample_rate, int harmonics = 10,
                      double amplitude = 0.5);

Waveform Silence(double seconds, int sample_rate);

// A synthetic voice: spectral envelope from a few resonances on top of a
// 1/h tilt, and a pitch register.
struct ToyVoice {
  std::string id;
  SourceKind kind = SourceKind::kSinging;
  double base_f0 = 220.0;
  std::vector<double> formants_hz = {700.0, 1200.0, 2600.0};
  double breath = 0.01;
};

// Sung phrase: held notes on a major scale above base_f0 with vibrato,
// short unvoiced gaps between notes.
Waveform SingingClip(const ToyVoice& voice, double seconds, int sample_rate, std::uint64_t seed);

// Spoken phrase: syllables with falling intonation, alternating voiced
// vowels and noise bursts.
Waveform SpeechClip(const ToyVoice& voice, double seconds, int sample_rate, std::uint64_t seed);

struct ToyCorpusOptions {
  double clip_seconds = 2.0;
  int sample_rate = 24000;
  int speech_clips = 3;
  int target_clips = 2;
  std::uint64_t seed = 1;
};

// Files written by WriteToyCorpus, all inside its output directory.
struct ToyCorpusLayout {
  std::filesystem::path speech_manifest;   // speech speakers
  std::filesystem::path singing_manifest;  // singer pool, train split
  std::filesystem::path target_manifest;   // target singer, train split
  std::filesystem::path postproc_manifest;  // every singing train clip
  std::filesystem::path heldout_wav;       // pool singer clip kept out of training
  std::string heldout_speaker;
  std::string target_speaker;
  std::vector<ToyVoice> voices;
};

// Two speech speakers, three pool singers with 4/3/2 clips, a target singer
// and one held-out clip. Deterministic in the seed.
ToyCorpusLayout WriteToyCorpus(const std::filesystem::path& out_dir,
                               const ToyCorpusOptions& options = {});

}  // namespace singshift

#endif  // SINGSHIFT_TOY_CORPUS_H_
