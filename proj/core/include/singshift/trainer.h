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

#ifndef SINGSHIFT_TRAINER_H_
#define SINGSHIFT_TRAINER_H_

#include <torch/torch.h>

#include <cstdint>
#include <memory>
#include <random>
#include <string>

#include "singshift/checkpoint.h"
#include "singshift/config.h"
#include "singshift/converter.h"
#include "singshift/discriminator.h"
#include "singshift/losses.h"
#include "singshift/tensor_dsp.h"

namespace singshift {

// Standard-normal tensor drawn from a seeded engine, so every draw is part
// of the serializable trainer state.
torch::Tensor DrawNormal(std::mt19937_64& rng, at::IntArrayRef shape,
                         torch::Dtype dtype = torch::kFloat);

std::string SerializeRng(const std::mt19937_64& rng);
void DeserializeRng(const std::string& text, std::mt19937_64& rng);

// Owns the converter, its discriminator and both optimizers. Each Step is
// one discriminator update on detached fakes followed by one generator
// update, then a learning-rate decay.
class ConverterTrainer {
 public:
  ConverterTrainer(const PipelineConfig& cfg, Synthesizer model, std::uint64_t seed);

  // Generator-side losses with the given posterior noise; the
  // discriminator is only evaluated. adv_d is left undefined.
  LossTerms GeneratorLosses(const ConverterBatch& batch, const torch::Tensor& eps,
                            SynthesizerOutput* out = nullptr);

  // Throws kNonFinite before applying an update whose losses are not finite.
  LossTerms Step(const ConverterBatch& batch);

  int step() const { return step_; }
  double learning_rate() const;
  Synthesizer& model() { return model_; }
  MultiDiscriminator& discriminator() { return disc_; }
  MelTransform& mel() { return mel_; }
  std::mt19937_64& rng() { return rng_; }

  // Model, discriminator, optimizer moments, step, rng and learning rate.
  void Save(Checkpoint& ckpt) const;
  void Restore(const Checkpoint& ckpt);

 private:
  void SetLearningRate(double lr);

  PipelineConfig cfg_;
  Synthesizer model_;
  MultiDiscriminator disc_{nullptr};
  MelTransform mel_{nullptr};
  std::unique_ptr<torch::optim::Adam> opt_g_;
  std::unique_ptr<torch::optim::Adam> opt_d_;
  std::mt19937_64 rng_;
  int step_ = 0;
};

// Checkpoint metadata for a converter: kind, config text, model hash,
// registry, stage, step.
void AddConverterMeta(Checkpoint& ckpt, const PipelineConfig& cfg, const Synthesizer& model,
                      const std::string& stage, int step);

// Rebuilds a converter from a checkpoint (registry and weights). kConfig
// on a hash mismatch unless `force`.
Synthesizer LoadSynthesizer(const Checkpoint& ckpt, const PipelineConfig& cfg, bool force);

}  // namespace singshift

#endif  // SINGSHIFT_TRAINER_H_
