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

#ifndef SINGSHIFT_CONFIG_H_
#define SINGSHIFT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace singshift {

inline constexpr int kConfigSchemaVersion = 1;

struct AudioConfig {
  int sample_rate = 24000;
  int n_fft = 1024;
  int win = 1024;
  int hop = 256;
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = 12000.0;
};

// Probabilistic-YIN analysis and HMM smoothing.
struct PitchConfig {
  double fmin = 65.0;
  double fmax = 1100.0;
  int frame_length = 1024;
  int n_thresholds = 100;
  double beta_a = 2.0;
  double beta_b = 18.0;
  double bin_cents = 20.0;
  int max_jump_bins = 35;
  double switch_prob = 0.01;
  // Share of candidate mass trusted as voiced evidence in the HMM.
  double yin_trust = 0.5;
};

struct ExcitationConfig {
  double amplitude = 0.1;
  double sigma = 0.003;
  int harmonics = 8;
  int crossfade = 16;
  std::uint64_t seed = 20231;
};

struct ContentConfig {
  int dim = 256;
  std::string source = "toy";  // toy | external
  std::uint64_t toy_seed = 1234;
  int align_tolerance = 3;
};

struct ModelConfig {
  std::string preset = "toy";  // toy | full
  int latent_dim = 8;
  int hidden = 16;
  int filter = 32;
  int heads = 2;
  int transformer_layers = 6;
  int attention_window = 4;
  int posterior_layers = 6;
  int posterior_kernel = 5;
  int flow_couplings = 4;
  int flow_layers = 2;
  int flow_kernel = 5;
  bool flow_speaker = true;
  int speaker_dim = 8;
  std::vector<int> upsample_rates = {8, 8, 4};
  int upsample_channels = 32;
  std::vector<int> resblock_kernels = {3};
  std::vector<std::vector<int>> resblock_dilations = {{1, 3}};
  // Empty means every upsampling stage receives the excitation.
  std::vector<int> inject_stages;
  double temperature = 0.667;
  std::vector<int> mpd_periods = {2, 3, 5, 7, 11};
  std::vector<int> mpd_channels = {8, 16, 32};
  std::vector<int> msd_channels = {8, 16, 32};
};

struct TrainingConfig {
  int batch_size = 2;
  double learning_rate = 2e-3;
  double beta1 = 0.8;
  double beta2 = 0.99;
  double adam_eps = 1e-9;
  double lr_decay = 0.999875;
  int segment_frames = 32;
  int checkpoint_every = 100;
  std::uint64_t seed = 7;
  double mel_weight = 45.0;
  double kl_weight = 1.0;
  double adv_weight = 1.0;
  double fm_weight = 2.0;
  int steps_pretrain_speech = 500;
  int steps_pretrain_singing = 500;
  int steps_adapt = 300;
  double new_speaker_sigma = 0.01;
};

struct KeyShiftConfig {
  std::string mode = "linear";  // linear | semitone
  // speech-only speaker -> surrogate singer whose profile is borrowed.
  std::map<std::string, std::string> fallback;
};

struct AugmentConfig {
  double speed_min = 0.8;
  double speed_max = 1.4;
  int window = 1024;
  int synthesis_hop = 256;
  int tolerance = 256;
};

struct PostprocConfig {
  bool enabled = true;
  int dsp_harmonics = 64;
  double anchor_weight = 1.0;
  double anchor_cutoff_hz = 4000.0;
  double peak = 0.95;
  double silence_threshold = 1e-2;
  std::uint64_t noise_seed = 99;
  int refiner_steps = 500;
  int refiner_channels = 32;
};

struct PipelineConfig {
  int schema_version = kConfigSchemaVersion;
  AudioConfig audio;
  PitchConfig pitch;
  ExcitationConfig excitation;
  ContentConfig content;
  ModelConfig model;
  TrainingConfig training;
  KeyShiftConfig keyshift;
  AugmentConfig augment;
  PostprocConfig postproc;

  // Toy defaults are the member initializers above. The full preset
  // records the full-size converter and its training schedule.
  static PipelineConfig Toy();
  static PipelineConfig Full();

  // Throws kConfig on any violated constraint.
  void Validate() const;

  // Canonical INI text of every field, in schema order.
  std::string ToIni() const;

  // FNV-1a over the sections that shape features and model topology
  // (audio, pitch, excitation, content, model). Hex string.
  std::string ModelHash() const;

  int UpsampleProduct() const;
};

// Parses an INI file. `[meta] schema_version` is required, `[model] preset`
// selects the base preset, and every other key overrides it. Unknown
// sections or keys are rejected.
PipelineConfig LoadConfig(const std::filesystem::path& path);
PipelineConfig ParseConfig(const std::string& text);
void SaveConfig(const PipelineConfig& cfg, const std::filesystem::path& path);

}  // namespace singshift

#endif  // SINGSHIFT_CONFIG_H_
