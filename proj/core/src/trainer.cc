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

#include "singshift/trainer.h"

#include <sstream>

#include "singshift/error.h"

namespace singshift {

torch::Tensor DrawNormal(std::mt19937_64& rng, at::IntArrayRef shape, torch::Dtype dtype) {
  std::int64_t n = 1;
  for (auto s : shape) n *= s;
  std::vector<double> v(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& x : v) x = normal(rng);
  return torch::from_blob(v.data(), shape, torch::kDouble).to(dtype).clone();
}

std::string SerializeRng(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void DeserializeRng(const std::string& text, std::mt19937_64& rng) {
  std::istringstream is(text);
  is >> rng;
  if (!is) throw Error(ErrorCode::kCorruption, "bad random engine state");
}

ConverterTrainer::ConverterTrainer(const PipelineConfig& cfg, Synthesizer model,
                                   std::uint64_t seed)
    : cfg_(cfg), model_(std::move(model)), rng_(seed) {
  torch::manual_seed(seed ^ 0x5d1);
  disc_ = MultiDiscriminator(cfg.model);
  mel_ = MelTransform(cfg.audio);
  const auto& t = cfg.training;
  auto opts = [&] {
    return torch::optim::AdamOptions(t.learning_rate)
        .betas({t.beta1, t.beta2})
        .eps(t.adam_eps);
  };
  opt_g_ = std::make_unique<torch::optim::Adam>(model_->parameters(), opts());
  opt_d_ = std::make_unique<torch::optim::Adam>(disc_->parameters(), opts());
}

double ConverterTrainer::learning_rate() const {
  return static_cast<const torch::optim::AdamOptions&>(opt_g_->param_groups()[0].options()).lr();
}

void ConverterTrainer::SetLearningRate(double lr) {
  for (auto* opt : {opt_g_.get(), opt_d_.get()}) {
    for (auto& g : opt->param_groups()) {
      static_cast<torch::optim::AdamOptions&>(g.options()).lr(lr);
    }
  }
}

LossTerms ConverterTrainer::GeneratorLosses(const ConverterBatch& batch, const torch::Tensor& eps,
                                            SynthesizerOutput* out) {
  const auto& t = cfg_.training;
  SynthesizerOutput o = model_->forward(batch, eps);
  LossTerms terms;
  const torch::Tensor mel_hat = mel_(o.wave);
  terms.mel_l1 = L1PerItem(mel_hat, batch.mel);
  terms.kl = KlLoss(o.flow.z, o.posterior.eps, o.posterior.logvar, o.prior.mean, o.prior.logvar,
                    o.flow.logdet);
  const auto real = disc_(batch.wave);
  const auto fake = disc_(o.wave);
  terms.adv_g = GeneratorAdversarialLoss(fake);
  terms.feature_matching = FeatureMatchingLoss(real, fake);
  terms.total_g = t.mel_weight * terms.mel_l1 + t.kl_weight * terms.kl +
                  t.adv_weight * terms.adv_g + t.fm_weight * terms.feature_matching;
  if (out) *out = std::move(o);
  return terms;
}

LossTerms ConverterTrainer::Step(const ConverterBatch& batch) {
  model_->train();
  disc_->train();
  const torch::Tensor eps = DrawNormal(
      rng_, {batch.spec.size(0), cfg_.model.latent_dim, batch.spec.size(2)},
      batch.spec.scalar_type());

  SynthesizerOutput out = model_->forward(batch, eps);

  // Discriminator update on detached fakes.
  const auto real_d = disc_(batch.wave);
  const auto fake_d = disc_(out.wave.detach());
  LossTerms d_terms;
  d_terms.adv_d = DiscriminatorAdversarialLoss(real_d, fake_d);
  d_terms.total_d = d_terms.adv_d;
  CheckFinite(d_terms);
  opt_d_->zero_grad();
  d_terms.total_d.mean().backward();
  opt_d_->step();

  // Generator update against the refreshed discriminator.
  const auto& t = cfg_.training;
  LossTerms terms;
  terms.mel_l1 = L1PerItem(mel_(out.wave), batch.mel);
  terms.kl = KlLoss(out.flow.z, out.posterior.eps, out.posterior.logvar, out.prior.mean,
                    out.prior.logvar, out.flow.logdet);
  std::vector<DiscriminatorOutput> real;
  {
    torch::NoGradGuard guard;
    real = disc_(batch.wave);
  }
  const auto fake = disc_(out.wave);
  terms.adv_g = GeneratorAdversarialLoss(fake);
  terms.feature_matching = FeatureMatchingLoss(real, fake);
  terms.total_g = t.mel_weight * terms.mel_l1 + t.kl_weight * terms.kl +
                  t.adv_weight * terms.adv_g + t.fm_weight * terms.feature_matching;
  terms.adv_d = d_terms.adv_d.detach();
  terms.total_d = d_terms.total_d.detach();
  CheckFinite(terms);
  opt_g_->zero_grad();
  terms.total_g.mean().backward();
  opt_g_->step();

  ++step_;
  SetLearningRate(learning_rate() * t.lr_decay);
  return terms;
}

void ConverterTrainer::Save(Checkpoint& ckpt) const {
  AddModule(ckpt, "model.", *model_);
  AddModule(ckpt, "disc.", *disc_);
  AddAdam(ckpt, "opt_g.", *opt_g_);
  AddAdam(ckpt, "opt_d.", *opt_d_);
  ckpt.meta["trainer_step"] = std::to_string(step_);
  ckpt.meta["rng"] = SerializeRng(rng_);
  std::ostringstream lr;
  lr.precision(17);
  lr << learning_rate();
  ckpt.meta["learning_rate"] = lr.str();
}

void ConverterTrainer::Restore(const Checkpoint& ckpt) {
  LoadModule(ckpt, "model.", *model_, true);
  LoadModule(ckpt, "disc.", *disc_);
  LoadAdam(ckpt, "opt_g.", *opt_g_);
  LoadAdam(ckpt, "opt_d.", *opt_d_);
  step_ = std::stoi(ckpt.Meta("trainer_step"));
  DeserializeRng(ckpt.Meta("rng"), rng_);
  SetLearningRate(std::stod(ckpt.Meta("learning_rate")));
}

void AddConverterMeta(Checkpoint& ckpt, const PipelineConfig& cfg, const Synthesizer& model,
                      const std::string& stage, int step) {
  ckpt.meta["kind"] = "converter";
  ckpt.meta["config"] = cfg.ToIni();
  ckpt.meta["model_hash"] = cfg.ModelHash();
  ckpt.meta["stage"] = stage;
  ckpt.meta["step"] = std::to_string(step);
  std::string speakers;
  for (const auto& id : model->registry().ids()) speakers += id + "\n";
  ckpt.meta["speakers"] = speakers;
}

Synthesizer LoadSynthesizer(const Checkpoint& ckpt, const PipelineConfig& cfg, bool force) {
  if (ckpt.Meta("kind") != "converter") {
    throw Error(ErrorCode::kFormat, "checkpoint does not hold a converter");
  }
  CheckModelHash(ckpt, cfg.ModelHash(), force);
  Synthesizer model(cfg);
  std::istringstream ids(ckpt.Meta("speakers"));
  std::string id;
  while (std::getline(ids, id)) {
    if (!id.empty()) model->registry().Register(id);
  }
  LoadModule(ckpt, "model.", *model, true);
  if (model->speaker_table().size(0) != model->registry().size()) {
    throw Error(ErrorCode::kCorruption, "speaker table and registry sizes differ");
  }
  return model;
}

}  // namespace singshift
