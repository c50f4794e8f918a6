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

#include "singshift/training.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "singshift/augment.h"
#include "singshift/checkpoint.h"
#include "singshift/content.h"
#include "singshift/error.h"
#include "singshift/losses.h"
#include "singshift/mel.h"
#include "singshift/tensor_dsp.h"
#include "singshift/trainer.h"

namespace singshift {

namespace fs = std::filesystem;

Utterance PrepareUtterance(const Waveform& wave, const fs::path& feature_path,
                           const std::string& speaker, const PipelineConfig& cfg) {
  if (wave.sample_rate != cfg.audio.sample_rate) {
    throw Error(ErrorCode::kUnsupported, "clip sample rate " + std::to_string(wave.sample_rate) +
                                             " differs from configured " +
                                             std::to_string(cfg.audio.sample_rate));
  }
  if (wave.size() == 0) throw Error(ErrorCode::kArgument, "empty clip");
  MelSpectrogram mel = ComputeMel(wave, cfg.audio);
  F0Contour f0 = EstimateF0(wave, cfg.pitch, cfg.audio.hop);
  ContentFeatures content = feature_path.empty()
                                ? ToyEncode(mel, cfg.content.dim, cfg.content.toy_seed)
                                : LoadFeatures(feature_path, cfg.content.dim);
  AlignedStreams aligned = AlignStreams(std::move(content), std::move(f0), std::move(mel),
                                        cfg.content.align_tolerance);
  Utterance u;
  u.speaker = speaker;
  const std::size_t frames = aligned.mel.frames();
  u.mel = std::move(aligned.mel.values);
  u.content = std::move(aligned.content.values);
  u.f0 = std::move(aligned.f0);
  u.spec = LinearSpectrogram(wave.samples, cfg.audio);
  u.spec.TruncateRows(frames);
  u.wave = wave.samples;
  u.wave.resize(frames * cfg.audio.hop, 0.0f);
  u.pitch = PitchFeatures(u.f0);
  u.excitation = ContourExcitation(u.f0, u.wave.size(), cfg.excitation);
  return u;
}

ConverterDataset::ConverterDataset(std::vector<Utterance> utterances, const PipelineConfig& cfg)
    : utterances_(std::move(utterances)), cfg_(cfg) {
  if (utterances_.empty()) throw Error(ErrorCode::kCorpus, "empty training corpus");
}

ConverterDataset ConverterDataset::FromManifest(const CorpusManifest& manifest,
                                                const PipelineConfig& cfg) {
  std::vector<Utterance> utts;
  for (const auto& e : manifest.entries) {
    if (e.features.empty() && cfg.content.source == "external") {
      throw Error(ErrorCode::kIo, "external content requested but no feature file for " +
                                      e.wav.string());
    }
    utts.push_back(PrepareUtterance(LoadWav(e.wav), e.features, e.speaker, cfg));
  }
  return ConverterDataset(std::move(utts), cfg);
}

namespace {

// Copies rows [start, start + n) of `m` into a [cols, n] channel-major
// block, filling missing rows with `pad` (or the last row when pad_hold).
void FillChannels(const Matrix& m, std::size_t start, std::size_t n, float pad, bool pad_hold,
                  float* dst) {
  const std::size_t cols = m.cols();
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t r = start + t;
    for (std::size_t c = 0; c < cols; ++c) {
      float v = pad;
      if (r < m.rows()) {
        v = m(r, c);
      } else if (pad_hold && m.rows() > 0) {
        v = m(m.rows() - 1, c);
      }
      dst[c * n + t] = v;
    }
  }
}

void FillSamples(const std::vector<float>& src, std::size_t start, std::size_t n, float* dst) {
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] = start + i < src.size() ? src[start + i] : 0.0f;
  }
}

}  // namespace

ConverterBatch ConverterDataset::Collate(
    const std::vector<std::pair<std::size_t, std::size_t>>& picks, int segment,
    const SpeakerRegistry& registry) const {
  const long b = static_cast<long>(picks.size());
  const long s = segment;
  const long hop = cfg_.audio.hop;
  const long bins = cfg_.audio.n_fft / 2 + 1;
  const long mels = cfg_.audio.n_mels;
  const long dim = cfg_.content.dim;
  ConverterBatch batch;
  batch.spec = torch::empty({b, bins, s});
  batch.mel = torch::empty({b, mels, s});
  batch.content = torch::empty({b, dim, s});
  batch.pitch = torch::empty({b, 2, s});
  batch.wave = torch::empty({b, 1, s * hop});
  batch.excitation = torch::empty({b, 1, s * hop});
  batch.speakers = torch::empty({b}, torch::kLong);
  const float mel_pad = std::log(kMelFloor);
  for (long i = 0; i < b; ++i) {
    const Utterance& u = utterances_[picks[i].first];
    const std::size_t start = picks[i].second;
    FillChannels(u.spec, start, s, 0.0f, false, batch.spec[i].data_ptr<float>());
    FillChannels(u.mel, start, s, mel_pad, false, batch.mel[i].data_ptr<float>());
    FillChannels(u.content, start, s, 0.0f, false, batch.content[i].data_ptr<float>());
    FillChannels(u.pitch, start, s, 0.0f, true, batch.pitch[i].data_ptr<float>());
    FillSamples(u.wave, start * hop, s * hop, batch.wave[i].data_ptr<float>());
    FillSamples(u.excitation, start * hop, s * hop, batch.excitation[i].data_ptr<float>());
    batch.speakers[i] = registry.Index(u.speaker);
  }
  return batch;
}

ConverterBatch ConverterDataset::Sample(std::mt19937_64& rng, int batch, int segment,
                                        const SpeakerRegistry& registry) const {
  std::vector<std::pair<std::size_t, std::size_t>> picks;
  for (int i = 0; i < batch; ++i) {
    const std::size_t idx = std::uniform_int_distribution<std::size_t>(0, size() - 1)(rng);
    const std::size_t frames = utterances_[idx].frames();
    const std::size_t span = frames > static_cast<std::size_t>(segment) ? frames - segment : 0;
    const std::size_t start = std::uniform_int_distribution<std::size_t>(0, span)(rng);
    picks.emplace_back(idx, start);
  }
  return Collate(picks, segment, registry);
}

ConverterBatch ConverterDataset::Whole(std::size_t index, const SpeakerRegistry& registry) const {
  const Utterance& u = utterances_.at(index);
  return Collate({{index, 0}}, static_cast<int>(u.frames()), registry);
}

std::vector<std::string> SelectAuxiliarySingers(const std::map<std::string, double>& durations,
                                                const std::string& target) {
  std::vector<std::pair<std::string, double>> cands;
  for (const auto& [id, d] : durations) {
    if (id != target) cands.emplace_back(id, d);
  }
  if (cands.size() < 2) {
    throw Error(ErrorCode::kCorpus, "adaptation needs at least two auxiliary singers, found " +
                                        std::to_string(cands.size()));
  }
  std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return {cands[0].first, cands[1].first};
}

CorpusManifest BuildAdaptCorpus(const std::string& target, const CorpusManifest& target_clips,
                                const CorpusManifest& pool, std::uint64_t seed,
                                const fs::path& augment_dir, const AugmentConfig& augment) {
  const std::vector<std::string> aux = SelectAuxiliarySingers(pool.SpeakerDurations(), target);
  std::vector<Waveform> clips;
  std::vector<const ManifestEntry*> sources;
  for (const auto& e : target_clips.entries) {
    if (e.speaker != target) continue;
    clips.push_back(LoadWav(e.wav));
    sources.push_back(&e);
  }
  if (clips.empty()) throw Error(ErrorCode::kCorpus, "no clips for target speaker " + target);

  CorpusManifest out;
  fs::create_directories(augment_dir);
  const auto augmented = AugmentCorpus(clips, seed, augment);
  for (const auto& clip : augmented) {
    const ManifestEntry& src = *sources[clip.source_index];
    ManifestEntry e;
    e.speaker = target;
    e.split = src.split;
    e.duration_s = clip.wave.duration();
    if (!clip.is_copy) {
      e.wav = src.wav;
      e.features = src.features;
    } else {
      char name[64];
      std::snprintf(name, sizeof(name), "_sp%.4f.wav", clip.factor);
      e.wav = augment_dir / (src.wav.stem().string() + name);
      SaveWav(clip.wave, e.wav);
    }
    out.entries.push_back(std::move(e));
  }
  for (const auto& id : aux) {
    for (const auto& e : pool.entries) {
      if (e.speaker == id) out.entries.push_back(e);
    }
  }
  return out;
}

const char* StageName(StageKind kind) {
  switch (kind) {
    case StageKind::kPretrainSpeech:
      return "pretrain_speech";
    case StageKind::kPretrainSinging:
      return "pretrain_singing";
    case StageKind::kAdapt:
      return "adapt";
  }
  return "unknown";
}

StageKind ParseStage(const std::string& name) {
  for (StageKind k : {StageKind::kPretrainSpeech, StageKind::kPretrainSinging, StageKind::kAdapt}) {
    if (name == StageName(k)) return k;
  }
  throw Error(ErrorCode::kArgument,
              "unknown stage '" + name + "' (pretrain_speech, pretrain_singing, adapt)");
}

void TrainingStage::Validate() const {
  if (steps <= 0) throw Error(ErrorCode::kConfig, "stage steps must be positive");
  if (batch_size <= 0) throw Error(ErrorCode::kConfig, "batch size must be positive");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::kConfig, "learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error(ErrorCode::kConfig, "Adam betas must lie in [0, 1)");
  }
}

std::vector<TrainingStage> StagePlan(const PipelineConfig& cfg) {
  const auto& t = cfg.training;
  std::vector<TrainingStage> plan;
  const std::pair<StageKind, int> steps[] = {{StageKind::kPretrainSpeech, t.steps_pretrain_speech},
                                             {StageKind::kPretrainSinging, t.steps_pretrain_singing},
                                             {StageKind::kAdapt, t.steps_adapt}};
  for (const auto& [kind, n] : steps) {
    TrainingStage s;
    s.kind = kind;
    s.steps = n;
    s.batch_size = t.batch_size;
    s.learning_rate = t.learning_rate;
    s.beta1 = t.beta1;
    s.beta2 = t.beta2;
    plan.push_back(s);
  }
  return plan;
}

fs::path StageCheckpointPath(const fs::path& out_dir, StageKind kind) {
  return out_dir / (std::string(StageName(kind)) + ".ckpt");
}

fs::path StageLossLogPath(const fs::path& out_dir, StageKind kind) {
  return out_dir / (std::string(StageName(kind)) + "_loss.csv");
}

namespace {

std::string LossHeader() {
  std::string h = "step";
  for (const auto& n : LossTermNames()) h += "," + n;
  return h;
}

// Keeps the header and rows up to `max_step`; creates the file if needed.
void PrepareLossLog(const fs::path& path, int max_step, bool keep) {
  std::vector<std::string> lines;
  if (keep && fs::exists(path)) {
    std::ifstream is(path);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
      if (first) {
        first = false;
        continue;
      }
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      if (std::stoi(line.substr(0, comma)) <= max_step) lines.push_back(line);
    }
  }
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot write loss log " + path.string());
  os << LossHeader() << '\n';
  for (const auto& l : lines) os << l << '\n';
}

void AppendLossRow(std::ofstream& os, int step, const std::vector<double>& values) {
  os << step;
  char buf[40];
  for (double v : values) {
    std::snprintf(buf, sizeof(buf), ",%.9g", v);
    os << buf;
  }
  os << '\n';
  os.flush();
}

void SaveStage(const fs::path& path, const PipelineConfig& cfg, ConverterTrainer& trainer,
               StageKind kind) {
  Checkpoint ckpt;
  AddConverterMeta(ckpt, cfg, trainer.model(), StageName(kind), trainer.step());
  trainer.Save(ckpt);
  WriteCheckpoint(ckpt, path);
}

}  // namespace

StageResult RunStageOnDataset(const TrainingStage& stage, const ConverterDataset& data,
                              const PipelineConfig& cfg, std::uint64_t seed,
                              const RunOptions& options) {
  stage.Validate();
  fs::create_directories(options.out_dir);
  const fs::path ckpt_path = StageCheckpointPath(options.out_dir, stage.kind);
  const fs::path log_path = StageLossLogPath(options.out_dir, stage.kind);

  PipelineConfig run_cfg = cfg;
  run_cfg.training.batch_size = stage.batch_size;
  run_cfg.training.learning_rate = stage.learning_rate;
  run_cfg.training.beta1 = stage.beta1;
  run_cfg.training.beta2 = stage.beta2;

  std::optional<Checkpoint> resume_ckpt;
  if (options.resume && fs::exists(ckpt_path)) {
    resume_ckpt = ReadCheckpoint(ckpt_path);
    if (resume_ckpt->Meta("stage") != StageName(stage.kind)) {
      throw Error(ErrorCode::kStage, "resume checkpoint belongs to stage " +
                                         resume_ckpt->Meta("stage"));
    }
  }

  Synthesizer model{nullptr};
  if (resume_ckpt) {
    model = LoadSynthesizer(*resume_ckpt, cfg, options.force);
  } else if (!options.base_checkpoint.empty()) {
    const Checkpoint base = ReadCheckpoint(options.base_checkpoint);
    const std::string base_stage = base.Meta("stage");
    if (stage.kind == StageKind::kAdapt && base_stage != StageName(StageKind::kPretrainSpeech) &&
        base_stage != StageName(StageKind::kPretrainSinging)) {
      throw Error(ErrorCode::kStage, "adapt needs a pretrain checkpoint, got stage " + base_stage);
    }
    model = LoadSynthesizer(base, cfg, options.force);
  } else {
    if (stage.kind == StageKind::kAdapt) {
      throw Error(ErrorCode::kStage, "adapt requires a pretrain checkpoint");
    }
    torch::manual_seed(seed);
    model = Synthesizer(cfg);
  }

  // Speakers new to the table: random rows for a fresh model, mean-based
  // rows when extending a trained one.
  std::vector<std::string> speakers;
  for (const auto& u : data.utterances()) speakers.push_back(u.speaker);
  std::sort(speakers.begin(), speakers.end());
  speakers.erase(std::unique(speakers.begin(), speakers.end()), speakers.end());
  const bool fresh = model->registry().size() == 0;
  std::mt19937_64 spk_rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (const auto& id : speakers) {
    if (model->registry().Contains(id)) continue;
    if (fresh) {
      torch::NoGradGuard guard;
      torch::Tensor& table = model->speaker_table();
      const torch::Tensor row = DrawNormal(spk_rng, {1, table.size(1)}, table.scalar_type());
      table.set_data(torch::cat({table.detach(), row}, 0));
      model->registry().Register(id);
    } else {
      AdaptNewSpeaker(model, id, spk_rng(), cfg.training.new_speaker_sigma);
    }
  }

  ConverterTrainer trainer(run_cfg, model, seed);
  if (resume_ckpt) trainer.Restore(*resume_ckpt);
  PrepareLossLog(log_path, trainer.step(), resume_ckpt.has_value());
  std::ofstream log(log_path, std::ios::app);

  StageResult result;
  result.checkpoint = ckpt_path;
  result.loss_log = log_path;
  const int every = std::max(1, cfg.training.checkpoint_every);
  while (trainer.step() < stage.steps) {
    ConverterBatch batch =
        data.Sample(trainer.rng(), stage.batch_size, cfg.training.segment_frames,
                    trainer.model()->registry());
    if (options.batch_hook) options.batch_hook(trainer.step() + 1, batch);
    LossTerms terms;
    try {
      terms = trainer.Step(batch);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNonFinite) throw;
      const std::string last = fs::exists(ckpt_path) ? ckpt_path.string() : "(none written yet)";
      throw Error(ErrorCode::kNonFinite, std::string(e.what()) + " at step " +
                                             std::to_string(trainer.step() + 1) +
                                             "; last good checkpoint: " + last);
    }
    result.final_losses = terms.Scalars();
    AppendLossRow(log, trainer.step(), result.final_losses);
    if (options.on_step) options.on_step(trainer.step(), result.final_losses);
    if (trainer.step() % every == 0 && trainer.step() < stage.steps) {
      SaveStage(ckpt_path, run_cfg, trainer, stage.kind);
    }
  }
  SaveStage(ckpt_path, run_cfg, trainer, stage.kind);
  result.final_step = trainer.step();
  return result;
}

StageResult RunStage(const TrainingStage& stage, const PipelineConfig& cfg, std::uint64_t seed,
                     const RunOptions& options) {
  if (stage.manifest.empty()) throw Error(ErrorCode::kArgument, "stage has no manifest");
  const CorpusManifest manifest = ReadManifest(stage.manifest);
  return RunStageOnDataset(stage, ConverterDataset::FromManifest(manifest, cfg), cfg, seed,
                           options);
}

}  // namespace singshift
