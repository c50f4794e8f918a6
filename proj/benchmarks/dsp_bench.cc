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

#include <benchmark/benchmark.h>

#include "singshift/augment.h"
#include "singshift/config.h"
#include "singshift/dsp_synth.h"
#include "singshift/mel.h"
#include "singshift/pitch.h"
#include "singshift/toy_corpus.h"

namespace singshift {
namespace {

constexpr int kRate = 24000;

Waveform Clip(double seconds) {
  const ToyVoice voice{"bench", SourceKind::kSinging, 220.0, {700.0, 1200.0, 2600.0}, 0.004};
  return SingingClip(voice, seconds, kRate, 1);
}

void BM_Pyin(benchmark::State& state) {
  const Waveform w = Clip(static_cast<double>(state.range(0)));
  const PitchConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(EstimateF0(w, cfg, 256));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(w.size()));
}
BENCHMARK(BM_Pyin)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Mel(benchmark::State& state) {
  const Waveform w = Clip(static_cast<double>(state.range(0)));
  const AudioConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(ComputeMel(w, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(w.size()));
}
BENCHMARK(BM_Mel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TimeStretch(benchmark::State& state) {
  const Waveform w = Clip(2.0);
  const double speed = state.range(0) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(TimeStretch(w, speed));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(w.size()));
}
BENCHMARK(BM_TimeStretch)->Arg(80)->Arg(140)->Unit(benchmark::kMillisecond);

void BM_DspSynthesize(benchmark::State& state) {
  const PipelineConfig cfg = PipelineConfig::Toy();
  const Waveform w = Clip(2.0);
  const MelSpectrogram mel = ComputeMel(w, cfg.audio);
  const F0Contour f0 = EstimateF0(w, cfg.pitch, cfg.audio.hop);
  const DspSynthOptions opts = DspSynthOptions::From(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(DspSynthesize(mel, f0, cfg.audio, opts));
}
BENCHMARK(BM_DspSynthesize)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace singshift
