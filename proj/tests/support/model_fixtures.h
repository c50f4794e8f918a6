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

#ifndef SINGSHIFT_TESTS_SUPPORT_MODEL_FIXTURES_H_
#define SINGSHIFT_TESTS_SUPPORT_MODEL_FIXTURES_H_

#include <torch/torch.h>

#include <random>
#include <string>
#include <vector>

#include "singshift/config.h"
#include "singshift/converter.h"
#include "singshift/toy_corpus.h"
#include "singshift/training.h"

namespace singshift::testing {

// Sung clips of toy voices with their speakers registered in a fresh model.
struct ToySetup {
  PipelineConfig cfg;
  Synthesizer model{nullptr};
  std::vector<Utterance> utterances;
};

inline ToySetup MakeToySetup(const std::vector<ToyVoice>& voices, double seconds = 1.0,
                             std::uint64_t seed = 1,
                             const PipelineConfig& cfg = PipelineConfig::Toy()) {
  ToySetup s;
  s.cfg = cfg;
  torch::manual_seed(seed);
  s.model = Synthesizer(cfg);
  for (std::size_t i = 0; i < voices.size(); ++i) {
    AdaptNewSpeaker(s.model, voices[i].id, seed + i, 1.0);
    const Waveform w = SingingClip(voices[i], seconds, cfg.audio.sample_rate, seed + 17 * i);
    s.utterances.push_back(PrepareUtterance(w, {}, voices[i].id, cfg));
  }
  return s;
}

inline std::vector<ToyVoice> TwoVoices() {
  return {{"alto", SourceKind::kSinging, 196.0, {700.0, 1200.0, 2600.0}, 0.01},
          {"tenor", SourceKind::kSinging, 147.0, {500.0, 1500.0, 2400.0}, 0.01}};
}

// Largest elementwise difference.
inline double MaxAbsDiff(const torch::Tensor& a, const torch::Tensor& b) {
  return (a - b).abs().max().item<double>();
}

}  // namespace singshift::testing

#endif  // SINGSHIFT_TESTS_SUPPORT_MODEL_FIXTURES_H_
