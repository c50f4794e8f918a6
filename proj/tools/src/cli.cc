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

#include "singshift/cli.h"

#include <torch/torch.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "singshift/audio.h"
#include "singshift/augment.h"
#include "singshift/checkpoint.h"
#include "singshift/config.h"
#include "singshift/content.h"
#include "singshift/converter.h"
#include "singshift/keyshift.h"
#include "singshift/manifest.h"
#include "singshift/mel.h"
#include "singshift/pitch.h"
#include "singshift/postproc.h"
#include "singshift/toy_corpus.h"
#include "singshift/trainer.h"
#include "singshift/training.h"

namespace singshift {

namespace fs = std::filesystem;

namespace {

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

struct Globals {
  std::string config;
  bool force = false;
};

PipelineConfig ResolveConfig(const Globals& g) {
  if (!g.config.empty()) return LoadConfig(g.config);
  if (const char* env = std::getenv("SINGSHIFT_CONFIG"); env && *env) return LoadConfig(env);
  return PipelineConfig::Toy();
}

struct ProfileArgs {
  std::string corpus;
  std::string manifest;
  std::string speaker;
  std::string kind = "singing";
  std::string out;
};

int CmdProfilePitch(const Globals& g, const ProfileArgs& a, std::ostream& out) {
  const PipelineConfig cfg = ResolveConfig(g);
  std::vector<fs::path> files;
  if (!a.manifest.empty()) {
    for (const auto& e : ReadManifest(a.manifest).entries) {
      if (e.speaker == a.speaker) files.push_back(e.wav);
    }
    if (files.empty()) throw Error(ErrorCode::kIo, "no clips of " + a.speaker + " in " + a.manifest);
  } else {
    if (a.corpus.empty()) throw Error(ErrorCode::kArgument, "pass --corpus or --manifest");
    files = ListWavFiles(a.corpus);
    if (files.empty()) throw Error(ErrorCode::kIo, "no .wav files in " + a.corpus);
  }
  std::vector<Waveform> clips;
  for (const auto& f : files) clips.push_back(LoadWav(f));
  const PitchProfile p =
      BuildProfile(clips, a.speaker, ParseSourceKind(a.kind), cfg.pitch, cfg.audio.hop);
  ProfileRegistry reg;
  if (fs::exists(a.out)) ReadProfiles(a.out, reg);
  reg[p.speaker_id] = p;
  std::vector<PitchProfile> all;
  for (const auto& [id, prof] : reg) all.push_back(prof);
  WriteProfiles(all, a.out);
  out << "speaker\t" << p.speaker_id << "\n";
  out << "mean_f0\t" << Fmt("%.6f", p.mean_f0) << "\n";
  out << "voiced_frames\t" << p.n_voiced_frames << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string stage;
  std::string manifest;
  std::string out_dir;
  std::string base;
  bool resume = false;
  int steps = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int CmdTrain(const Globals& g, const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = ResolveConfig(g);
  const StageKind kind = ParseStage(a.stage);
  TrainingStage stage;
  for (const auto& s : StagePlan(cfg)) {
    if (s.kind == kind) stage = s;
  }
  stage.manifest = a.manifest;
  if (a.steps > 0) stage.steps = a.steps;
  RunOptions opts;
  opts.out_dir = a.out_dir;
  opts.base_checkpoint = a.base;
  opts.resume = a.resume;
  opts.force = g.force;
  const int every = std::max(1, cfg.training.checkpoint_every);
  opts.on_step = [&](int step, const std::vector<double>& losses) {
    if (step % every == 0 || step == stage.steps) {
      err << "[" << StageName(kind) << "] step " << step << " mel_l1 " << Fmt("%.4f", losses[0])
          << " kl " << Fmt("%.4f", losses[1]) << " total_g " << Fmt("%.4f", losses[6])
          << " total_d " << Fmt("%.4f", losses[7]) << "\n";
    }
  };
  const std::uint64_t seed = a.seed_set ? a.seed : cfg.training.seed;
  const StageResult r = RunStage(stage, cfg, seed, opts);
  out << "checkpoint\t" << r.checkpoint.string() << "\n";
  out << "loss_log\t" << r.loss_log.string() << "\n";
  out << "steps\t" << r.final_step << "\n";
  return kExitOk;
}

struct AdaptCorpusArgs {
  std::string target;
  std::string target_manifest;
  std::string pool;
  std::string out;
  std::string augment_dir;
  std::uint64_t seed = 0;
};

int CmdAdaptCorpus(const Globals& g, const AdaptCorpusArgs& a, std::ostream& out) {
  const PipelineConfig cfg = ResolveConfig(g);
  const CorpusManifest target = ReadManifest(a.target_manifest);
  const CorpusManifest pool = ReadManifest(a.pool);
  const fs::path aug = a.augment_dir.empty() ? fs::path(a.out).parent_path() / "augmented"
                                             : fs::path(a.augment_dir);
  const CorpusManifest m = BuildAdaptCorpus(a.target, target, pool, a.seed, aug, cfg.augment);
  WriteManifest(m, a.out);
  const auto aux = SelectAuxiliarySingers(pool.SpeakerDurations(), a.target);
  out << "manifest\t" << a.out << "\n";
  out << "entries\t" << m.size() << "\n";
  out << "auxiliary\t" << aux[0] << "," << aux[1] << "\n";
  return kExitOk;
}

struct PostprocTrainArgs {
  std::string manifest;
  std::string out;
  int steps = 0;
  std::uint64_t seed = 0;
};

int CmdTrainPostproc(const Globals& g, const PostprocTrainArgs& a, std::ostream& out,
                     std::ostream& err) {
  const PipelineConfig cfg = ResolveConfig(g);
  const CorpusManifest m = ReadManifest(a.manifest);
  std::vector<Waveform> clips;
  for (const auto& e : m.entries) clips.push_back(LoadWav(e.wav));
  RefinerTrainOptions opts;
  opts.steps = a.steps > 0 ? a.steps : cfg.postproc.refiner_steps;
  opts.batch_size = cfg.training.batch_size;
  opts.out_checkpoint = a.out;
  const int every = std::max(1, cfg.training.checkpoint_every);
  opts.on_step = [&](int step, const std::vector<double>& l) {
    if (step % every == 0 || step == opts.steps) {
      err << "[refiner] step " << step << " mel_l1 " << Fmt("%.4f", l[0]) << " anchor "
          << Fmt("%.4f", l[5]) << " total_g " << Fmt("%.4f", l[6]) << "\n";
    }
  };
  TrainRefiner(clips, cfg, a.seed, opts);
  out << "checkpoint\t" << a.out << "\n";
  return kExitOk;
}

struct ConvertArgs {
  std::string source;
  std::string target;
  std::string checkpoint;
  std::vector<std::string> profiles;
  std::string source_speaker;
  std::string features;
  std::string content;
  std::optional<double> key_shift;
  std::string refiner;
  bool no_postprocess = false;
  std::string out;
};

int CmdConvert(const Globals& g, const ConvertArgs& a, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = ResolveConfig(g);
  const Waveform source = LoadWav(a.source);
  Synthesizer model = LoadSynthesizer(ReadCheckpoint(a.checkpoint), cfg, g.force);
  model->registry().Index(a.target);

  const F0Contour f0 = EstimateF0(source, cfg.pitch, cfg.audio.hop);
  ShiftResult shifted;
  if (a.key_shift) {
    shifted = ShiftF0ByDelta(f0, *a.key_shift, cfg.pitch.fmin);
  } else {
    ProfileRegistry reg;
    for (const auto& p : a.profiles) ReadProfiles(p, reg);
    const PitchProfile target = ResolveTargetProfile(a.target, reg, cfg.keyshift.fallback);
    double source_mean = 0.0;
    if (!a.source_speaker.empty()) {
      auto it = reg.find(a.source_speaker);
      if (it == reg.end()) {
        throw Error(ErrorCode::kResolution, "no pitch profile for source " + a.source_speaker);
      }
      source_mean = it->second.mean_f0;
    } else {
      source_mean = MeanVoicedF0(f0);
      if (source_mean <= 0.0) throw Error(ErrorCode::kProfile, "source clip has no voiced frames");
    }
    shifted = ShiftF0(f0, source_mean, target.mean_f0, cfg.pitch.fmin,
                      ParseShiftMode(cfg.keyshift.mode));
  }

  const std::string content_source = a.content.empty() ? cfg.content.source : a.content;
  ContentFeatures content;
  if (content_source == "external") {
    if (a.features.empty()) throw Error(ErrorCode::kIo, "--content external needs --features");
    content = LoadFeatures(a.features, cfg.content.dim);
  } else if (content_source == "toy") {
    content = ToyEncode(ComputeMel(source, cfg.audio), cfg.content.dim, cfg.content.toy_seed);
  } else {
    throw Error(ErrorCode::kArgument, "unknown content source " + content_source);
  }

  Waveform converted = Convert(model, cfg, a.target, shifted.contour, content, cfg.excitation.seed);
  if (!a.no_postprocess) {
    PostProcessor pp(cfg);
    if (cfg.postproc.enabled) {
      if (a.refiner.empty()) {
        throw Error(ErrorCode::kState, "post-processing needs --refiner (or --no-postprocess)");
      }
      pp.LoadRefiner(ReadCheckpoint(a.refiner), g.force);
    }
    PostProcessReport report;
    converted = pp.Process(converted, &report);
    err << "post-process: refined " << (report.refined ? "yes" : "no") << " mel_distance "
        << Fmt("%.4f", report.mel_distance) << "\n";
  }
  converted.samples.resize(source.size(), 0.0f);
  SaveWav(converted, a.out);
  out << "delta_f0_hz\t" << Fmt("%.6f", shifted.delta_hz) << "\n";
  out << "clamped_frames\t" << shifted.clamped << "\n";
  out << "output\t" << a.out << "\n";
  return kExitOk;
}

struct AugmentArgs {
  std::string in;
  std::string out;
  std::uint64_t seed = 0;
};

int CmdAugment(const Globals& g, const AugmentArgs& a, std::ostream& out) {
  const PipelineConfig cfg = ResolveConfig(g);
  if (ListWavFiles(a.in).empty()) throw Error(ErrorCode::kIo, "no .wav files in " + a.in);
  const auto rows = AugmentDirectory(a.in, a.out, a.seed, cfg.augment);
  out << "augmented\t" << rows.size() << "\n";
  out << "manifest\t" << (fs::path(a.out) / "augment_manifest.tsv").string() << "\n";
  return kExitOk;
}

struct AnalyzeArgs {
  std::string wav;
  std::string f0_out;
  std::string mel_out;
  std::string content_out;
};

int CmdAnalyze(const Globals& g, const AnalyzeArgs& a, std::ostream& out) {
  const PipelineConfig cfg = ResolveConfig(g);
  const Waveform w = LoadWav(a.wav);
  const F0Contour f0 = EstimateF0(w, cfg.pitch, cfg.audio.hop);
  const MelSpectrogram mel = ComputeMel(w, cfg.audio);
  if (!a.f0_out.empty()) WriteF0Text(f0, a.f0_out);
  if (!a.mel_out.empty()) WriteFeatureFile(mel.values, mel.hop, mel.sample_rate, a.mel_out);
  if (!a.content_out.empty()) {
    SaveFeatures(ToyEncode(mel, cfg.content.dim, cfg.content.toy_seed), a.content_out);
  }
  out << "frames\t" << f0.frames() << "\n";
  out << "voiced_frames\t" << f0.VoicedCount() << "\n";
  out << "mean_f0\t" << Fmt("%.6f", MeanVoicedF0(f0)) << "\n";
  return kExitOk;
}

struct ToyCorpusArgs {
  std::string out;
  std::uint64_t seed = 1;
  double seconds = 2.0;
};

int CmdToyCorpus(const ToyCorpusArgs& a, std::ostream& out) {
  ToyCorpusOptions o;
  o.seed = a.seed;
  o.clip_seconds = a.seconds;
  const ToyCorpusLayout l = WriteToyCorpus(a.out, o);
  out << "speech_manifest\t" << l.speech_manifest.string() << "\n";
  out << "singing_manifest\t" << l.singing_manifest.string() << "\n";
  out << "target_manifest\t" << l.target_manifest.string() << "\n";
  out << "postproc_manifest\t" << l.postproc_manifest.string() << "\n";
  out << "heldout\t" << l.heldout_wav.string() << "\n";
  return kExitOk;
}

struct ConfigArgs {
  std::string preset = "toy";
  std::string out;
};

int CmdConfig(const ConfigArgs& a, std::ostream& out) {
  PipelineConfig cfg;
  if (a.preset == "toy") {
    cfg = PipelineConfig::Toy();
  } else if (a.preset == "full") {
    cfg = PipelineConfig::Full();
  } else {
    throw Error(ErrorCode::kArgument, "unknown preset " + a.preset + " (toy, full)");
  }
  if (a.out.empty()) {
    out << cfg.ToIni();
  } else {
    SaveConfig(cfg, a.out);
    out << "config\t" << a.out << "\n";
  }
  return kExitOk;
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRegistry:
    case ErrorCode::kProfile:
    case ErrorCode::kResolution:
      return kExitResolution;
    case ErrorCode::kNonFinite:
      return kExitNonFinite;
    case ErrorCode::kAlignment:
      return kExitAlignment;
    default:
      return kExitFailure;
  }
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Singing voice conversion toolkit", "singshift"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Pipeline config (INI); defaults to $SINGSHIFT_CONFIG");
  app.add_flag("--force", g.force, "Load checkpoints whose config hash differs");

  ProfileArgs prof;
  auto* c_prof = app.add_subcommand("profile-pitch", "Average voiced f0 of a speaker's clips");
  auto* corpus_opt = c_prof->add_option("--corpus", prof.corpus, "Directory of .wav clips");
  c_prof->add_option("--manifest", prof.manifest, "Manifest; clips of --speaker are used")
      ->excludes(corpus_opt);
  c_prof->add_option("--speaker", prof.speaker, "Speaker id")->required();
  c_prof->add_option("--kind", prof.kind, "singing or speech")->capture_default_str();
  c_prof->add_option("--out", prof.out, "Profile table (TSV); merged if it exists")->required();

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Run one converter training stage");
  c_train->add_option("--stage", train.stage, "pretrain_speech, pretrain_singing or adapt")
      ->required();
  c_train->add_option("--manifest", train.manifest, "Corpus manifest (TSV)")->required();
  c_train->add_option("--out", train.out_dir, "Output directory")->required();
  c_train->add_option("--base", train.base, "Checkpoint to start from (required for adapt)");
  c_train->add_flag("--resume", train.resume, "Continue from this stage's checkpoint in --out");
  c_train->add_option("--steps", train.steps, "Override the preset's step count");
  c_train->add_option("--seed", train.seed, "Training seed")
      ->each([&](const std::string&) { train.seed_set = true; });

  AdaptCorpusArgs adapt;
  auto* c_adapt = app.add_subcommand(
      "adapt-corpus", "Target clips x2 (augmented) plus the two largest pool singers");
  c_adapt->add_option("--target", adapt.target, "Target speaker id")->required();
  c_adapt->add_option("--target-manifest", adapt.target_manifest, "Target clips")->required();
  c_adapt->add_option("--pool", adapt.pool, "Singer pool manifest")->required();
  c_adapt->add_option("--out", adapt.out, "Output manifest")->required();
  c_adapt->add_option("--augment-dir", adapt.augment_dir, "Where stretched copies go");
  c_adapt->add_option("--seed", adapt.seed, "Augmentation seed")->capture_default_str();

  PostprocTrainArgs pp;
  auto* c_pp = app.add_subcommand("train-postproc", "Train the post-processing refiner");
  c_pp->add_option("--manifest", pp.manifest, "Clean clips (TSV manifest)")->required();
  c_pp->add_option("--out", pp.out, "Refiner checkpoint path")->required();
  c_pp->add_option("--steps", pp.steps, "Override postproc.refiner_steps");
  c_pp->add_option("--seed", pp.seed, "Training seed")->capture_default_str();

  ConvertArgs conv;
  auto* c_conv = app.add_subcommand("convert", "Convert a clip to a target speaker");
  c_conv->add_option("--source", conv.source, "Source .wav")->required();
  c_conv->add_option("--target", conv.target, "Target speaker id")->required();
  c_conv->add_option("--checkpoint", conv.checkpoint, "Converter checkpoint")->required();
  c_conv->add_option("--profiles", conv.profiles, "Pitch profile tables");
  c_conv->add_option("--source-speaker", conv.source_speaker,
                     "Source speaker profile (default: the clip's own mean f0)");
  c_conv->add_option("--features", conv.features, "Content feature file (FEAT)");
  c_conv->add_option("--content", conv.content, "toy or external (default from config)");
  c_conv->add_option("--key-shift", conv.key_shift, "Fixed delta f0 in Hz, bypassing profiles");
  c_conv->add_option("--refiner", conv.refiner, "Refiner checkpoint for post-processing");
  c_conv->add_flag("--no-postprocess", conv.no_postprocess, "Skip post-processing");
  c_conv->add_option("--out", conv.out, "Output .wav")->required();

  AugmentArgs aug;
  auto* c_aug = app.add_subcommand("augment", "Speed-perturb every clip of a directory");
  c_aug->add_option("--in", aug.in, "Input directory")->required();
  c_aug->add_option("--out", aug.out, "Output directory")->required();
  c_aug->add_option("--seed", aug.seed, "Factor seed")->capture_default_str();

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "Pitch track and mel of one clip");
  c_an->add_option("--wav", an.wav, "Input .wav")->required();
  c_an->add_option("--f0-out", an.f0_out, "f0 table (TSV)");
  c_an->add_option("--mel-out", an.mel_out, "Mel spectrogram (FEAT)");
  c_an->add_option("--content-out", an.content_out, "Toy content features (FEAT)");

  ToyCorpusArgs toy;
  auto* c_toy = app.add_subcommand("toy-corpus", "Write a small synthetic corpus");
  c_toy->add_option("--out", toy.out, "Output directory")->required();
  c_toy->add_option("--seed", toy.seed, "Corpus seed")->capture_default_str();
  c_toy->add_option("--seconds", toy.seconds, "Clip length")->capture_default_str();

  ConfigArgs cfg_args;
  auto* c_cfg = app.add_subcommand("config", "Print or write a preset configuration");
  c_cfg->add_option("--preset", cfg_args.preset, "toy or full")->capture_default_str();
  c_cfg->add_option("--out", cfg_args.out, "Write to this file instead of stdout");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  torch::set_num_threads(1);
  try {
    if (c_prof->parsed()) return CmdProfilePitch(g, prof, out);
    if (c_train->parsed()) return CmdTrain(g, train, out, err);
    if (c_adapt->parsed()) return CmdAdaptCorpus(g, adapt, out);
    if (c_pp->parsed()) return CmdTrainPostproc(g, pp, out, err);
    if (c_conv->parsed()) return CmdConvert(g, conv, out, err);
    if (c_aug->parsed()) return CmdAugment(g, aug, out);
    if (c_an->parsed()) return CmdAnalyze(g, an, out);
    if (c_toy->parsed()) return CmdToyCorpus(toy, out);
    if (c_cfg->parsed()) return CmdConfig(cfg_args, out);
  } catch (const Error& e) {
    err << "singshift: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const c10::Error& e) {
    err << "singshift: torch error: " << e.what_without_backtrace() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "singshift: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace singshift
