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

#ifndef SINGSHIFT_CONVERTER_H_
#define SINGSHIFT_CONVERTER_H_

#include <torch/torch.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "singshift/audio.h"
#include "singshift/config.h"
#include "singshift/content.h"
#include "singshift/generator.h"
#include "singshift/matrix.h"
#include "singshift/modules.h"
#include "singshift/pitch.h"

namespace singshift {

// Speaker id -> dense row index of the embedding table.
class SpeakerRegistry {
 public:
  int Register(const std::string& id);  // kRegistry if already present
  int Index(const std::string& id) const;  // kRegistry if unknown
  bool Contains(const std::string& id) const { return index_.count(id) > 0; }
  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::map<std::string, int> index_;
  std::vector<std::string> ids_;
};

struct PosteriorSample {
  torch::Tensor mean;    // [B, latent, T]
  torch::Tensor logvar;  // [B, latent, T]
  torch::Tensor eps;     // the standard-normal draw used for z
  torch::Tensor z;       // mean + exp(logvar / 2) * eps
};

struct PriorStats {
  torch::Tensor mean;
  torch::Tensor logvar;
};

class PosteriorEncoderImpl : public torch::nn::Module {
 public:
  PosteriorEncoderImpl(int in_channels, const ModelConfig& m);

  // spec: [B, bins, T]; g: [B, spk, 1]; eps: [B, latent, T] or undefined
  // (treated as zeros).
  PosteriorSample forward(const torch::Tensor& spec, const torch::Tensor& g,
                          const torch::Tensor& eps = {});

 private:
  int latent_;
  torch::nn::Conv1d pre_{nullptr};
  WaveNet wavenet_{nullptr};
  torch::nn::Conv1d proj_{nullptr};
};
TORCH_MODULE(PosteriorEncoder);

class PriorEncoderImpl : public torch::nn::Module {
 public:
  PriorEncoderImpl(int content_dim, const ModelConfig& m);

  // content: [B, D, T]; pitch: [B, 2, T]; g: [B, spk, 1].
  PriorStats forward(const torch::Tensor& content, const torch::Tensor& pitch,
                     const torch::Tensor& g);

 private:
  int latent_;
  torch::nn::Conv1d content_proj_{nullptr};
  torch::nn::Conv1d pitch_proj_{nullptr};
  torch::nn::Conv1d speaker_proj_{nullptr};
  TransformerEncoder encoder_{nullptr};
  torch::nn::Conv1d proj_{nullptr};
};
TORCH_MODULE(PriorEncoder);

// Affine coupling: the second channel half is scaled and shifted by a
// WaveNet transform of the first half. The output projection starts at
// zero, so a fresh coupling is the identity.
class AffineCouplingImpl : public torch::nn::Module {
 public:
  AffineCouplingImpl(int channels, int hidden, int kernel, int layers, int cond_channels);

  // Returns the transformed tensor; adds sum(log scale) per item to *logdet.
  torch::Tensor forward(const torch::Tensor& x, const torch::Tensor& g, torch::Tensor* logdet);
  torch::Tensor inverse(const torch::Tensor& y, const torch::Tensor& g);

 private:
  int half_;
  torch::nn::Conv1d pre_{nullptr};
  WaveNet wavenet_{nullptr};
  torch::nn::Conv1d post_{nullptr};
};
TORCH_MODULE(AffineCoupling);

struct FlowOutput {
  torch::Tensor z;       // mapped tensor
  torch::Tensor logdet;  // [B]
};

// Couplings with a channel flip after each one.
class FlowImpl : public torch::nn::Module {
 public:
  explicit FlowImpl(const ModelConfig& m);

  FlowOutput forward(const torch::Tensor& z, const torch::Tensor& g);
  torch::Tensor inverse(const torch::Tensor& u, const torch::Tensor& g);

 private:
  bool use_speaker_;
  torch::nn::ModuleList couplings_;
};
TORCH_MODULE(Flow);

// Aligned, equal-length training examples.
struct ConverterBatch {
  torch::Tensor spec;        // [B, n_fft/2 + 1, T] linear magnitudes
  torch::Tensor content;     // [B, D, T]
  torch::Tensor pitch;       // [B, 2, T] from PitchFeatures
  torch::Tensor excitation;  // [B, 1, T * hop]
  torch::Tensor wave;        // [B, 1, T * hop]
  torch::Tensor mel;         // [B, n_mels, T]
  torch::Tensor speakers;    // [B] int64

  ConverterBatch To(torch::Dtype dtype) const;
};

struct SynthesizerOutput {
  PosteriorSample posterior;
  PriorStats prior;
  FlowOutput flow;  // posterior z mapped into the prior space
  torch::Tensor wave;  // [B, 1, T * hop]
};

class SynthesizerImpl : public torch::nn::Module {
 public:
  explicit SynthesizerImpl(const PipelineConfig& cfg);

  SynthesizerOutput forward(const ConverterBatch& batch, const torch::Tensor& eps);

  // [B, spk, 1] rows of the speaker table.
  torch::Tensor SpeakerEmbedding(const torch::Tensor& indices);

  // Prior sample (mean + temperature * std * noise) mapped back through the
  // inverse flow and decoded. noise: [1, latent, T].
  torch::Tensor Infer(const torch::Tensor& content, const torch::Tensor& pitch,
                      const torch::Tensor& excitation, int speaker, double temperature,
                      const torch::Tensor& noise);

  SpeakerRegistry& registry() { return registry_; }
  const SpeakerRegistry& registry() const { return registry_; }
  torch::Tensor& speaker_table() { return speaker_table_; }

  PosteriorEncoder posterior{nullptr};
  PriorEncoder prior{nullptr};
  Flow flow{nullptr};
  Generator decoder{nullptr};

 private:
  PipelineConfig cfg_;
  SpeakerRegistry registry_;
  torch::Tensor speaker_table_;  // [n_speakers, speaker_dim]
};
TORCH_MODULE(Synthesizer);

// Registers `id` and grows the table by one row initialized to the mean of
// the existing rows plus N(0, sigma^2) noise (N(0, 1) for an empty table).
// Existing rows are untouched. Returns the new index; throws kRegistry if
// `id` is already registered.
int AdaptNewSpeaker(Synthesizer& model, const std::string& id, std::uint64_t seed,
                    double sigma);

// frames x 2: log f0 with unvoiced gaps log-linearly interpolated (ends
// held, a fixed reference when no frame is voiced), and the voicing flag.
Matrix PitchFeatures(const F0Contour& f0);

// Sine excitation for a contour at `num_samples` samples.
std::vector<float> ContourExcitation(const F0Contour& f0, std::size_t num_samples,
                                     const ExcitationConfig& cfg);

// Inference: prior with the target speaker, inverse flow, excitation-driven
// decoder. Output length is content frames * hop. No posterior involved.
Waveform Convert(Synthesizer& model, const PipelineConfig& cfg, const std::string& target,
                 const F0Contour& shifted_f0, const ContentFeatures& content,
                 std::uint64_t noise_seed);

}  // namespace singshift

#endif  // SINGSHIFT_CONVERTER_H_
