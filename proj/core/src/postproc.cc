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

#include "singshift/postproc.h"

#include <algorithm>
#include <sstream>

#include "singshift/converter.h"
#include "singshift/error.h"
#include "singshift/excitation.h"
#include "singshift/trainer.h"

namespace singshift {

namespace {

std::string RefinerHash(const PipelineConfig& cfg) {
  return cfg.ModelHash() + "-r" + std::to_string(cfg.postproc.refiner_channels);
}

void FillRows(const Matrix& m, std::size_t start, std::size_t n, float pad, float* dst) {
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      dst[c * n + t] = start + t < m.rows() ? m(start + t, c) : pad;
    }
  }
}

void FillSamples(const std::vector<float>& src, std::size_t start, std::size_t n, float* dst) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = start + i < src.size() ? src[start + i] : 0.0f;
}

RefinerBatch Collate(const std::vector<const RefinerExample*>& picks,
                     const std::vector<std::size_t>& starts, int segment,
                     const AudioConfig& audio) {
  const long b = static_cast<long>(picks.size());
  const long s = segment;
  const long hop = audio.hop;
  RefinerBatch batch;
  batch.mel_input = torch::empty({b, audio.n_mels, s});
  batch.mel_target = torch::empty({b, audio.n_mels, s});
  batch.excitation = torch::empty({b, 1, s * hop});
  batch.harmonic = torch::empty({b, 1, s * hop});
  batch.wave = torch::empty({b, 1, s * hop});
  const float pad = std::log(kMelFloor);
  for (long i = 0; i < b; ++i) {
    const RefinerExample& e = *picks[i];
    FillRows(e.mel_input, starts[i], s, pad, batch.mel_input[i].data_ptr<float>());
    FillRows(e.mel_target, starts[i], s, pad, batch.mel_target[i].data_ptr<float>());
    FillSamples(e.excitation, starts[i] * hop, s * hop, batch.excitation[i].data_ptr<float>());
    FillSamples(e.harmonic, starts[i] * hop, s * hop, batch.harmonic[i].data_ptr<float>());
    FillSamples(e.wave, starts[i] * hop, s * hop, batch.wave[i].data_ptr<float>());
  }
  return batch;
}

// Pads with zeros or trims so the output has exactly `len` samples.
Waveform FitLength(Waveform w, std::size_t len) {
  w.samples.resize(len, 0.0f);
  return w;
}

}  // namespace

GeneratorOptions RefinerOptions(const PipelineConfig& cfg) {
  GeneratorOptions o = GeneratorOptions::ForDecoder(cfg.model);
  o.in_channels = cfg.audio.n_mels;
  o.cond_channels = 0;
  o.channels = cfg.postproc.refiner_channels;
  o.inject_stages.clear();
  return o;
}

std::vector<float> HarmonicExcitation(const F0Contour& f0, std::size_t num_samples,
                                      const ExcitationConfig& cfg) {
  const std::vector<float> per_sample = UpsampleF0(f0, num_samples, cfg.crossfade);
  ExcitationParams p = ExcitationParams::From(cfg);
  p.sigma = 0.0;
  std::vector<float> out = SineExcitation(per_sample, f0.sample_rate, p).samples;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (per_sample[i] <= 0.0f) out[i] = 0.0f;
  }
  return out;
}

RefinerExample PrepareRefinerExample(const Waveform& clip, const PipelineConfig& cfg) {
  if (clip.sample_rate != cfg.audio.sample_rate) {
    throw Error(ErrorCode::kUnsupported, "clip sample rate differs from configuration");
  }
  const MelSpectrogram mel = ComputeMel(clip, cfg.audio);
  const F0Contour f0 = EstimateF0(clip, cfg.pitch, cfg.audio.hop);
  const DspSynthOutput dsp = DspSynthesize(mel, f0, cfg.audio, DspSynthOptions::From(cfg));
  RefinerExample e;
  e.mel_target = mel.values;
  e.mel_input = ComputeMel(dsp.waveform, cfg.audio).values;
  e.mel_input.TruncateRows(mel.frames());
  const std::size_t n = mel.frames() * cfg.audio.hop;
  e.excitation = ContourExcitation(f0, n, cfg.excitation);
  e.harmonic = HarmonicExcitation(f0, n, cfg.excitation);
  e.wave = clip.samples;
  e.wave.resize(n, 0.0f);
  return e;
}

RefinerBatch SampleRefinerBatch(const std::vector<RefinerExample>& examples,
                                std::mt19937_64& rng, int batch, int segment,
                                const AudioConfig& audio) {
  if (examples.empty()) throw Error(ErrorCode::kCorpus, "no refiner examples");
  std::vector<const RefinerExample*> picks;
  std::vector<std::size_t> starts;
  for (int i = 0; i < batch; ++i) {
    const std::size_t idx = std::uniform_int_distribution<std::size_t>(0, examples.size() - 1)(rng);
    const std::size_t frames = examples[idx].mel_target.rows();
    const std::size_t span = frames > static_cast<std::size_t>(segment) ? frames - segment : 0;
    picks.push_back(&examples[idx]);
    starts.push_back(std::uniform_int_distribution<std::size_t>(0, span)(rng));
  }
  return Collate(picks, starts, segment, audio);
}

RefinerBatch WholeRefinerBatch(const RefinerExample& example, const AudioConfig& audio) {
  return Collate({&example}, {0}, static_cast<int>(example.mel_target.rows()), audio);
}

RefinerTrainer::RefinerTrainer(const PipelineConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed) {
  torch::manual_seed(seed);
  refiner_ = Generator(RefinerOptions(cfg));
  disc_ = MultiDiscriminator(cfg.model);
  mel_ = MelTransform(cfg.audio);
  lowpass_ = LowPass(cfg.postproc.anchor_cutoff_hz, cfg.audio.sample_rate);
  const auto& t = cfg.training;
  auto opts = [&] {
    return torch::optim::AdamOptions(t.learning_rate).betas({t.beta1, t.beta2}).eps(t.adam_eps);
  };
  opt_g_ = std::make_unique<torch::optim::Adam>(refiner_->parameters(), opts());
  opt_d_ = std::make_unique<torch::optim::Adam>(disc_->parameters(), opts());
}

double RefinerTrainer::learning_rate() const {
  return static_cast<const torch::optim::AdamOptions&>(opt_g_->param_groups()[0].options()).lr();
}

void RefinerTrainer::SetLearningRate(double lr) {
  for (auto* opt : {opt_g_.get(), opt_d_.get()}) {
    for (auto& g : opt->param_groups()) static_cast<torch::optim::AdamOptions&>(g.options()).lr(lr);
  }
}

LossTerms RefinerTrainer::GeneratorTerms(const RefinerBatch& batch, const torch::Tensor& wave_hat,
                                         const std::vector<DiscriminatorOutput>& real,
                                         const std::vector<DiscriminatorOutput>& fake) {
  const auto& t = cfg_.training;
  LossTerms terms;
  terms.mel_l1 = L1PerItem(mel_(wave_hat), batch.mel_target);
  terms.anchor = L1PerItem(lowpass_(wave_hat), lowpass_(batch.harmonic));
  terms.adv_g = GeneratorAdversarialLoss(fake);
  terms.feature_matching = FeatureMatchingLoss(real, fake);
  terms.total_g = t.mel_weight * terms.mel_l1 + t.adv_weight * terms.adv_g +
                  t.fm_weight * terms.feature_matching +
                  cfg_.postproc.anchor_weight * terms.anchor;
  return terms;
}

LossTerms RefinerTrainer::Step(const RefinerBatch& batch) {
  refiner_->train();
  disc_->train();
  const torch::Tensor wave_hat = refiner_(batch.mel_input, batch.excitation);

  const auto real_d = disc_(batch.wave);
  const auto fake_d = disc_(wave_hat.detach());
  LossTerms d_terms;
  d_terms.adv_d = DiscriminatorAdversarialLoss(real_d, fake_d);
  d_terms.total_d = d_terms.adv_d;
  CheckFinite(d_terms);
  opt_d_->zero_grad();
  d_terms.total_d.mean().backward();
  opt_d_->step();

  std::vector<DiscriminatorOutput> real;
  {
    torch::NoGradGuard guard;
    real = disc_(batch.wave);
  }
  LossTerms terms = GeneratorTerms(batch, wave_hat, real, disc_(wave_hat));
  terms.adv_d = d_terms.adv_d.detach();
  terms.total_d = d_terms.total_d.detach();
  CheckFinite(terms);
  opt_g_->zero_grad();
  terms.total_g.mean().backward();
  opt_g_->step();

  ++step_;
  SetLearningRate(learning_rate() * cfg_.training.lr_decay);
  return terms;
}

LossTerms RefinerTrainer::Evaluate(const RefinerBatch& batch) {
  torch::NoGradGuard guard;
  const torch::Tensor wave_hat = refiner_(batch.mel_input, batch.excitation);
  const auto real = disc_(batch.wave);
  const auto fake = disc_(wave_hat);
  LossTerms terms = GeneratorTerms(batch, wave_hat, real, fake);
  terms.adv_d = DiscriminatorAdversarialLoss(real, fake);
  terms.total_d = terms.adv_d;
  return terms;
}

void RefinerTrainer::Save(Checkpoint& ckpt) const {
  ckpt.meta["kind"] = "refiner";
  ckpt.meta["config"] = cfg_.ToIni();
  ckpt.meta["model_hash"] = RefinerHash(cfg_);
  ckpt.meta["step"] = std::to_string(step_);
  ckpt.meta["rng"] = SerializeRng(rng_);
  std::ostringstream lr;
  lr.precision(17);
  lr << learning_rate();
  ckpt.meta["learning_rate"] = lr.str();
  AddModule(ckpt, "refiner.", *refiner_);
  AddModule(ckpt, "disc.", *disc_);
  AddAdam(ckpt, "opt_g.", *opt_g_);
  AddAdam(ckpt, "opt_d.", *opt_d_);
}

void RefinerTrainer::Restore(const Checkpoint& ckpt) {
  if (ckpt.Meta("kind") != "refiner") throw Error(ErrorCode::kFormat, "not a refiner checkpoint");
  LoadModule(ckpt, "refiner.", *refiner_);
  LoadModule(ckpt, "disc.", *disc_);
  LoadAdam(ckpt, "opt_g.", *opt_g_);
  LoadAdam(ckpt, "opt_d.", *opt_d_);
  step_ = std::stoi(ckpt.Meta("step"));
  DeserializeRng(ckpt.Meta("rng"), rng_);
  SetLearningRate(std::stod(ckpt.Meta("learning_rate")));
}

void TrainRefiner(const std::vector<Waveform>& clips, const PipelineConfig& cfg,
                  std::uint64_t seed, const RefinerTrainOptions& options) {
  if (clips.empty()) throw Error(ErrorCode::kCorpus, "no clips for refiner training");
  std::vector<RefinerExample> examples;
  for (const auto& c : clips) examples.push_back(PrepareRefinerExample(c, cfg));
  RefinerTrainer trainer(cfg, seed);
  for (int i = 0; i < options.steps; ++i) {
    const RefinerBatch batch = SampleRefinerBatch(examples, trainer.rng(), options.batch_size,
                                                  cfg.training.segment_frames, cfg.audio);
    const LossTerms terms = trainer.Step(batch);
    if (options.on_step) options.on_step(trainer.step(), terms.Scalars());
  }
  if (!options.out_checkpoint.empty()) {
    Checkpoint ckpt;
    trainer.Save(ckpt);
    WriteCheckpoint(ckpt, options.out_checkpoint);
  }
}

PostProcessor::PostProcessor(const PipelineConfig& cfg) : cfg_(cfg) {}

void PostProcessor::LoadRefiner(const Checkpoint& ckpt, bool force) {
  if (ckpt.Meta("kind") != "refiner") throw Error(ErrorCode::kFormat, "not a refiner checkpoint");
  CheckModelHash(ckpt, RefinerHash(cfg_), force);
  Generator g(RefinerOptions(cfg_));
  LoadModule(ckpt, "refiner.", *g);
  g->eval();
  refiner_ = g;
}

void PostProcessor::SetRefiner(Generator refiner) { refiner_ = std::move(refiner); }

Waveform PostProcessor::Refine(const MelSpectrogram& mel_of_dsp, const F0Contour& f0) {
  if (!refiner_) throw Error(ErrorCode::kState, "refiner not loaded");
  const std::size_t frames = mel_of_dsp.frames();
  F0Contour contour = f0;
  while (contour.frames() < frames) {
    contour.f0_hz.push_back(0.0);
    contour.voiced.push_back(false);
  }
  contour.Truncate(frames);
  const std::size_t n = frames * cfg_.audio.hop;
  torch::NoGradGuard guard;
  const torch::Tensor mel = MatrixToChannels(mel_of_dsp.values).unsqueeze(0);
  const torch::Tensor exc =
      VectorToTensor(ContourExcitation(contour, n, cfg_.excitation)).view({1, 1, -1});
  Waveform out;
  out.sample_rate = cfg_.audio.sample_rate;
  out.samples = TensorToVector(refiner_(mel, exc));
  return out;
}

Waveform PostProcessor::Process(const Waveform& converted, PostProcessReport* report) {
  const MelSpectrogram mel = ComputeMel(converted, cfg_.audio);
  const F0Contour f0 = EstimateF0(converted, cfg_.pitch, cfg_.audio.hop);
  const DspSynthOutput dsp = DspSynthesize(mel, f0, cfg_.audio, DspSynthOptions::From(cfg_));
  Waveform out;
  if (!cfg_.postproc.enabled) {
    out = FitLength(dsp.waveform, converted.size());
  } else {
    const MelSpectrogram mel_dsp = ComputeMel(dsp.waveform, cfg_.audio);
    out = FitLength(Refine(mel_dsp, f0), converted.size());
  }
  if (report) {
    report->refined = cfg_.postproc.enabled;
    report->frames = mel.frames();
    report->mean_f0 = MeanVoicedF0(f0);
    report->mel_distance = MelL1Distance(ComputeMel(out, cfg_.audio), mel);
  }
  return out;
}

}  // namespace singshift
