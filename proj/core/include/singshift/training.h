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

#ifndef SINGSHIFT_TRAINING_H_
#define SINGSHIFT_TRAINING_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "singshift/audio.h"
#include "singshift/config.h"
#include "singshift/converter.h"
#include "singshift/manifest.h"
#include "singshift/matrix.h"
#include "singshift/pitch.h"

namespace singshift {

// Frame-aligned features of one clip. The waveform is zero-padded to
// frames * hop.
struct Utterance {
  std::string speaker;
  std::vector<float> wave;
  Matrix spec;        // frames x (n_fft/2 + 1)
  Matrix mel;         // frames x n_mels
  Matrix content;     // frames x content_dim
  Matrix pitch;       // frames x 2
  std::vector<float> excitation;
  F0Contour f0;

  std::size_t frames() const { return mel.rows(); }
};

// Computes every stream for a clip. Content comes from `feature_path` when
// given, else from the toy encoder.
Utterance PrepareUtterance(const Waveform& wave, const std::filesystem::path& feature_path,
                           const std::string& speaker, const PipelineConfig& cfg);

class ConverterDataset {
 public:
  ConverterDataset(std::vector<Utterance> utterances, const PipelineConfig& cfg);

  static ConverterDataset FromManifest(const CorpusManifest& manifest,
                                       const PipelineConfig& cfg);

  // `batch` uniformly drawn clips, each cut to a random window of
  // `segment` frames (zero-padded when shorter). Speaker indices come from
  // `registry`.
  ConverterBatch Sample(std::mt19937_64& rng, int batch, int segment,
                        const SpeakerRegistry& registry) const;

  // The full clip as a batch of one.
  ConverterBatch Whole(std::size_t index, const SpeakerRegistry& registry) const;

  const std::vector<Utterance>& utterances() const { return utterances_; }
  std::size_t size() const { return utterances_.size(); }

 private:
  ConverterBatch Collate(const std::vector<std::pair<std::size_t, std::size_t>>& picks,
                         int segment, const SpeakerRegistry& registry) const;

  std::vector<Utterance> utterances_;
  PipelineConfig cfg_;
};

// Two non-target speakers with the largest total duration; ties go to the
// lexicographically smaller id. kCorpus with fewer than two candidates.
std::vector<std::string> SelectAuxiliarySingers(const std::map<std::string, double>& durations,
                                                const std::string& target);

// Target clips plus one time-stretched copy each (written under
// `augment_dir`), followed by every clip of the two auxiliary singers.
CorpusManifest BuildAdaptCorpus(const std::string& target, const CorpusManifest& target_clips,
                                const CorpusManifest& pool, std::uint64_t seed,
                                const std::filesystem::path& augment_dir,
                                const AugmentConfig& augment);

enum class StageKind { kPretrainSpeech, kPretrainSinging, kAdapt };

const char* StageName(StageKind kind);
StageKind ParseStage(const std::string& name);

struct TrainingStage {
  StageKind kind = StageKind::kPretrainSpeech;
  std::filesystem::path manifest;
  int steps = 0;
  int batch_size = 2;
  double learning_rate = 2e-3;
  double beta1 = 0.8;
  double beta2 = 0.99;

  void Validate() const;
};

// speech -> singing -> adapt with the preset's steps and batch size.
std::vector<TrainingStage> StagePlan(const PipelineConfig& cfg);

struct RunOptions {
  std::filesystem::path out_dir;
  // Converter checkpoint to start from; mandatory for adapt.
  std::filesystem::path base_checkpoint;
  bool resume = false;
  bool force = false;
  // Called after every step with the scalar losses.
  std::function<void(int step, const std::vector<double>&)> on_step;
  // Test hook applied to each sampled batch before the step.
  std::function<void(int step, ConverterBatch&)> batch_hook;
};

struct StageResult {
  std::filesystem::path checkpoint;
  std::filesystem::path loss_log;
  int final_step = 0;
  std::vector<double> final_losses;
};

std::filesystem::path StageCheckpointPath(const std::filesystem::path& out_dir, StageKind kind);
std::filesystem::path StageLossLogPath(const std::filesystem::path& out_dir, StageKind kind);

// Runs one stage to `stage.steps` total steps. New manifest speakers are
// added to the speaker table with AdaptNewSpeaker. Checkpoints are written
// every training.checkpoint_every steps and at the end; a non-finite loss
// rethrows kNonFinite with the last good checkpoint left in place. Loss
// rows are appended to the stage's CSV log (one row per step).
StageResult RunStage(const TrainingStage& stage, const PipelineConfig& cfg,
                     std::uint64_t seed, const RunOptions& options);

// Same, with a prepared dataset instead of the stage manifest.
StageResult RunStageOnDataset(const TrainingStage& stage, const ConverterDataset& data,
                              const PipelineConfig& cfg, std::uint64_t seed,
                              const RunOptions& options);

}  // namespace singshift

#endif  // SINGSHIFT_TRAINING_H_
