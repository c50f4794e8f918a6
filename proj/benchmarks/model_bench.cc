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
#include <torch/torch.h>

#include "singshift/config.h"
#include "singshift/converter.h"
#include "singshift/generator.h"
#include "singshift/toy_corpus.h"
#include "singshift/trainer.h"
#include "singshift/training.h"

namespace singshift {
namespace {

void BM_DecoderForward(benchmark::State& state) {
  torch::set_num_threads(1);
  const PipelineConfig cfg = PipelineConfig::Toy();
  torch::manual_seed(0);
  Generator gen(GeneratorOptions::ForDecoder(cfg.model));
  const std::int64_t t = state.range(0);
  const auto x = torch::randn({1, cfg.model.latent_dim, t});
  const auto e = torch::randn({1, 1, t * cfg.audio.hop}) * 0.1;
  const auto g = torch::randn({1, cfg.model.speaker_dim, 1});
  torch::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(gen->forward(x, e, g));
  state.SetItemsProcessed(state.iterations() * t * cfg.audio.hop);
}
BENCHMARK(BM_DecoderForward)->Arg(32)->Arg(94)->Unit(benchmark::kMillisecond);

void BM_ConverterTrainStep(benchmark::State& state) {
  torch::set_num_threads(1);
  const PipelineConfig cfg = PipelineConfig::Toy();
  torch::manual_seed(0);
  Synthesizer model(cfg);
  AdaptNewSpeaker(model, "bench", 1, 1.0);
  const ToyVoice voice{"bench", SourceKind::kSinging, 220.0, {700.0, 1200.0, 2600.0}, 0.004};
  const Waveform w = SingingClip(voice, 2.0, cfg.audio.sample_rate, 1);
  const ConverterDataset data({PrepareUtterance(w, {}, "bench", cfg)}, cfg);
  ConverterTrainer trainer(cfg, model, 1);
  for (auto _ : state) {
    const ConverterBatch b = data.Sample(trainer.rng(), cfg.training.batch_size,
                                         cfg.training.segment_frames, model->registry());
    benchmark::DoNotOptimize(trainer.Step(b));
  }
}
BENCHMARK(BM_ConverterTrainStep)->Unit(benchmark::kMillisecond)->Iterations(10);

void BM_Convert(benchmark::State& state) {
  torch::set_num_threads(1);
  const PipelineConfig cfg = PipelineConfig::Toy();
  torch::manual_seed(0);
  Synthesizer model(cfg);
  AdaptNewSpeaker(model, "bench", 1, 1.0);
  model->eval();
  const ToyVoice voice{"bench", SourceKind::kSinging, 220.0, {700.0, 1200.0, 2600.0}, 0.004};
  const Waveform w = SingingClip(voice, 2.0, cfg.audio.sample_rate, 1);
  const Utterance u = PrepareUtterance(w, {}, "bench", cfg);
  ContentFeatures content;
  content.values = u.content;
  for (auto _ : state) benchmark::DoNotOptimize(Convert(model, cfg, "bench", u.f0, content, 1));
}
BENCHMARK(BM_Convert)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace singshift
