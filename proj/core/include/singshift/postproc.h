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

#ifndef SINGSHIFT_POSTPROC_H_
#define SINGSHIFT_POSTPROC_H_

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "singshift/audio.h"
#include "singshift/checkpoint.h"
#include "singshift/config.h"
#include "singshift/discriminator.h"
#include "singshift/dsp_synth.h"
#include "singshift/generator.h"
#include "singshift/losses.h"
#include "singshift/matrix.h"
#include "singshift/mel.h"
#include "singshift/pitch.h"
#include "singshift/tensor_dsp.h"

namespace singshift {

// Decoder topology of the converter, driven by a mel spectrogram instead of
// a latent and without speaker conditioning.
GeneratorOptions RefinerOptions(const PipelineConfig& cfg);

// Harmonic part of the excitation only (no noise), zero where unvoiced.
std::vector<float> HarmonicExcitation(const F0Contour& f0, std::size_t num_samples,
                                      const ExcitationConfig& cfg);

// One clip prepared for refiner training.
struct RefinerExample {
  Matrix mel_input;   // frames x n_mels, mel of the DSP resynthesis
  Matrix mel_target;  // frames x n_mels, mel of the clip
  std::vector<float> excitation;
  std::vector<float> harmonic;
  std::vector<float> wave;  // padded to frames * hop
};

RefinerExample PrepareRefinerExample(const Waveform& clip, const PipelineConfig& cfg);

struct RefinerBatch {
  torch::Tensor mel_input;   // [B, n_mels, T]
  torch::Tensor mel_target;  // [B, n_mels, T]
  torch::Tensor excitation;  // [B, 1, T * hop]
  torch::Tensor harmonic;    // [B, 1, T * hop]
  torch::Tensor wave;        // [B, 1, T * hop]
};

// Random segments of `segment` frames from uniformly drawn examples.
RefinerBatch SampleRefinerBatch(const std::vector<RefinerExample>& examples,
                                std::mt19937_64& rng, int batch, int segment,
                                const AudioConfig& audio);
RefinerBatch WholeRefinerBatch(const RefinerExample& example, const AudioConfig& audio);

class RefinerTrainer {
 public:
  RefinerTrainer(const PipelineConfig& cfg, std::uint64_t seed);

  // mel L1 + adversarial + feature matching + excitation anchor (L1
  // between low-passed output and low-passed harmonic excitation).
  LossTerms Step(const RefinerBatch& batch);
  LossTerms Evaluate(const RefinerBatch& batch);

  Generator& refiner() { return refiner_; }
  int step() const { return step_; }
  std::mt19937_64& rng() { return rng_; }

  void Save(Checkpoint& ckpt) const;
  void Restore(const Checkpoint& ckpt);

 private:
  LossTerms GeneratorTerms(const RefinerBatch& batch, const torch::Tensor& wave_hat,
                           const std::vector<DiscriminatorOutput>& real,
                           const std::vector<DiscriminatorOutput>& fake);
  void SetLearningRate(double lr);
  double learning_rate() const;

  PipelineConfig cfg_;
  Generator refiner_{nullptr};
  MultiDiscriminator disc_{nullptr};
  MelTransform mel_{nullptr};
  LowPass lowpass_{nullptr};
  std::unique_ptr<torch::optim::Adam> opt_g_;
  std::unique_ptr<torch::optim::Adam> opt_d_;
  std::mt19937_64 rng_;
  int step_ = 0;
};

struct RefinerTrainOptions {
  int steps = 500;
  int batch_size = 2;
  std::filesystem::path out_checkpoint;
  std::function<void(int step, const std::vector<double>&)> on_step;
};

// Trains a refiner on clean clips and writes a "refiner" checkpoint.
void TrainRefiner(const std::vector<Waveform>& clips, const PipelineConfig& cfg,
                  std::uint64_t seed, const RefinerTrainOptions& options);

struct PostProcessReport {
  bool refined = false;
  std::size_t frames = 0;
  double mean_f0 = 0.0;       // tracker mean over voiced frames of the input
  double mel_distance = 0.0;  // mel L1 between output and input
};

class PostProcessor {
 public:
  explicit PostProcessor(const PipelineConfig& cfg);

  // kFormat unless the checkpoint holds a refiner; kConfig on hash
  // mismatch unless `force`.
  void LoadRefiner(const Checkpoint& ckpt, bool force);
  void SetRefiner(Generator refiner);
  bool has_refiner() const { return static_cast<bool>(refiner_); }

  // Synthesizes from the mel of `mel_of_dsp` with excitation from `f0`.
  // kState without a refiner.
  Waveform Refine(const MelSpectrogram& mel_of_dsp, const F0Contour& f0);

  // mel + tracker on the input, DSP resynthesis, then the refiner on the
  // resynthesis mel. With postproc.enabled false the DSP output is returned
  // as is. Output length equals the input length.
  Waveform Process(const Waveform& converted, PostProcessReport* report = nullptr);

 private:
  PipelineConfig cfg_;
  Generator refiner_{nullptr};
};

}  // namespace singshift

#endif  // SINGSHIFT_POSTPROC_H_
