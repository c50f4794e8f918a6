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

#include "singshift/converter.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "singshift/error.h"
#include "singshift/excitation.h"
#include "singshift/tensor_dsp.h"

namespace singshift {

namespace {

// log(150 Hz), used when a contour has no voiced frame at all.
constexpr double kReferenceLogF0 = 5.0106352940962555;

torch::Tensor NormalTensor(std::mt19937_64& rng, at::IntArrayRef shape) {
  std::int64_t n = 1;
  for (auto s : shape) n *= s;
  std::vector<float> v(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (float& x : v) x = static_cast<float>(normal(rng));
  return torch::from_blob(v.data(), shape, torch::kFloat).clone();
}

}  // namespace

int SpeakerRegistry::Register(const std::string& id) {
  if (id.empty()) throw Error(ErrorCode::kRegistry, "empty speaker id");
  if (Contains(id)) throw Error(ErrorCode::kRegistry, "speaker already registered: " + id);
  const int idx = static_cast<int>(ids_.size());
  index_[id] = idx;
  ids_.push_back(id);
  return idx;
}

int SpeakerRegistry::Index(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::kRegistry, "unknown speaker: " + id);
  return it->second;
}

PosteriorEncoderImpl::PosteriorEncoderImpl(int in_channels, const ModelConfig& m)
    : latent_(m.latent_dim) {
  pre_ = register_module("pre",
                         torch::nn::Conv1d(torch::nn::Conv1dOptions(in_channels, m.hidden, 1)));
  wavenet_ = register_module("wavenet", WaveNet(m.hidden, m.posterior_kernel, 1,
                                                m.posterior_layers, m.speaker_dim));
  proj_ = register_module(
      "proj", torch::nn::Conv1d(torch::nn::Conv1dOptions(m.hidden, 2 * m.latent_dim, 1)));
}

PosteriorSample PosteriorEncoderImpl::forward(const torch::Tensor& spec, const torch::Tensor& g,
                                              const torch::Tensor& eps) {
  torch::Tensor h = wavenet_(pre_(spec), g);
  const torch::Tensor stats = proj_(h);
  PosteriorSample out;
  out.mean = stats.narrow(1, 0, latent_);
  out.logvar = stats.narrow(1, latent_, latent_);
  out.eps = eps.defined() ? eps : torch::zeros_like(out.mean);
  out.z = out.mean + torch::exp(0.5 * out.logvar) * out.eps;
  return out;
}

PriorEncoderImpl::PriorEncoderImpl(int content_dim, const ModelConfig& m) : latent_(m.latent_dim) {
  content_proj_ = register_module(
      "content_proj", torch::nn::Conv1d(torch::nn::Conv1dOptions(content_dim, m.hidden, 1)));
  pitch_proj_ = register_module("pitch_proj",
                                torch::nn::Conv1d(torch::nn::Conv1dOptions(2, m.hidden, 1)));
  speaker_proj_ = register_module(
      "speaker_proj", torch::nn::Conv1d(torch::nn::Conv1dOptions(m.speaker_dim, m.hidden, 1)));
  encoder_ = register_module("encoder",
                             TransformerEncoder(m.hidden, m.filter, m.heads,
                                                m.transformer_layers, m.attention_window));
  proj_ = register_module(
      "proj", torch::nn::Conv1d(torch::nn::Conv1dOptions(m.hidden, 2 * m.latent_dim, 1)));
}

PriorStats PriorEncoderImpl::forward(const torch::Tensor& content, const torch::Tensor& pitch,
                                     const torch::Tensor& g) {
  if (content.size(2) != pitch.size(2)) {
    throw Error(ErrorCode::kAlignment, "content and pitch frame counts differ");
  }
  torch::Tensor h = content_proj_(content) + pitch_proj_(pitch) + speaker_proj_(g);
  h = encoder_(h);
  const torch::Tensor stats = proj_(h);
  return {stats.narrow(1, 0, latent_), stats.narrow(1, latent_, latent_)};
}

AffineCouplingImpl::AffineCouplingImpl(int channels, int hidden, int kernel, int layers,
                                       int cond_channels)
    : half_(channels / 2) {
  if (channels % 2 != 0) throw Error(ErrorCode::kConfig, "coupling channels must be even");
  pre_ = register_module("pre", torch::nn::Conv1d(torch::nn::Conv1dOptions(half_, hidden, 1)));
  wavenet_ = register_module("wavenet", WaveNet(hidden, kernel, 1, layers, cond_channels));
  post_ = register_module("post",
                          torch::nn::Conv1d(torch::nn::Conv1dOptions(hidden, 2 * half_, 1)));
  torch::NoGradGuard guard;
  post_->weight.zero_();
  post_->bias.zero_();
}

torch::Tensor AffineCouplingImpl::forward(const torch::Tensor& x, const torch::Tensor& g,
                                          torch::Tensor* logdet) {
  const torch::Tensor x0 = x.narrow(1, 0, half_);
  const torch::Tensor x1 = x.narrow(1, half_, half_);
  const torch::Tensor stats = post_(wavenet_(pre_(x0), g));
  const torch::Tensor m = stats.narrow(1, 0, half_);
  const torch::Tensor logs = stats.narrow(1, half_, half_);
  const torch::Tensor y1 = m + x1 * torch::exp(logs);
  if (logdet) *logdet = *logdet + logs.sum({1, 2});
  return torch::cat({x0, y1}, 1);
}

torch::Tensor AffineCouplingImpl::inverse(const torch::Tensor& y, const torch::Tensor& g) {
  const torch::Tensor y0 = y.narrow(1, 0, half_);
  const torch::Tensor y1 = y.narrow(1, half_, half_);
  const torch::Tensor stats = post_(wavenet_(pre_(y0), g));
  const torch::Tensor m = stats.narrow(1, 0, half_);
  const torch::Tensor logs = stats.narrow(1, half_, half_);
  return torch::cat({y0, (y1 - m) * torch::exp(-logs)}, 1);
}

FlowImpl::FlowImpl(const ModelConfig& m) : use_speaker_(m.flow_speaker) {
  couplings_ = register_module("couplings", torch::nn::ModuleList());
  const int cond = m.flow_speaker ? m.speaker_dim : 0;
  for (int i = 0; i < m.flow_couplings; ++i) {
    couplings_->push_back(
        AffineCoupling(m.latent_dim, m.hidden, m.flow_kernel, m.flow_layers, cond));
  }
}

FlowOutput FlowImpl::forward(const torch::Tensor& z, const torch::Tensor& g) {
  const torch::Tensor cond = use_speaker_ ? g : torch::Tensor();
  FlowOutput out;
  out.logdet = torch::zeros({z.size(0)}, z.options());
  torch::Tensor x = z;
  for (auto& c : *couplings_) {
    x = c->as<AffineCoupling>()->forward(x, cond, &out.logdet);
    x = torch::flip(x, {1});
  }
  out.z = x;
  return out;
}

torch::Tensor FlowImpl::inverse(const torch::Tensor& u, const torch::Tensor& g) {
  const torch::Tensor cond = use_speaker_ ? g : torch::Tensor();
  torch::Tensor x = u;
  for (auto it = couplings_->end(); it != couplings_->begin();) {
    --it;
    x = torch::flip(x, {1});
    x = (*it)->as<AffineCoupling>()->inverse(x, cond);
  }
  return x;
}

ConverterBatch ConverterBatch::To(torch::Dtype dtype) const {
  ConverterBatch b = *this;
  b.spec = spec.to(dtype);
  b.content = content.to(dtype);
  b.pitch = pitch.to(dtype);
  b.excitation = excitation.to(dtype);
  b.wave = wave.to(dtype);
  b.mel = mel.to(dtype);
  return b;
}

SynthesizerImpl::SynthesizerImpl(const PipelineConfig& cfg) : cfg_(cfg) {
  const ModelConfig& m = cfg.model;
  if (cfg.UpsampleProduct() != cfg.audio.hop) {
    throw Error(ErrorCode::kConfig, "upsample product must equal hop");
  }
  posterior = register_module("posterior", PosteriorEncoder(cfg.audio.n_fft / 2 + 1, m));
  prior = register_module("prior", PriorEncoder(cfg.content.dim, m));
  flow = register_module("flow", Flow(m));
  decoder = register_module("decoder", Generator(GeneratorOptions::ForDecoder(m)));
  speaker_table_ = register_parameter("speaker_table", torch::zeros({0, m.speaker_dim}));
}

torch::Tensor SynthesizerImpl::SpeakerEmbedding(const torch::Tensor& indices) {
  if (indices.numel() > 0) {
    const auto max_index = indices.max().item<std::int64_t>();
    if (max_index >= speaker_table_.size(0) || indices.min().item<std::int64_t>() < 0) {
      throw Error(ErrorCode::kRegistry, "speaker index outside the embedding table");
    }
  }
  return speaker_table_.index_select(0, indices).unsqueeze(2);
}

SynthesizerOutput SynthesizerImpl::forward(const ConverterBatch& batch, const torch::Tensor& eps) {
  const torch::Tensor g = SpeakerEmbedding(batch.speakers);
  SynthesizerOutput out;
  out.posterior = posterior(batch.spec, g, eps);
  out.prior = prior(batch.content, batch.pitch, g);
  out.flow = flow(out.posterior.z, g);
  out.wave = decoder(out.posterior.z, batch.excitation, g);
  return out;
}

torch::Tensor SynthesizerImpl::Infer(const torch::Tensor& content, const torch::Tensor& pitch,
                                     const torch::Tensor& excitation, int speaker,
                                     double temperature, const torch::Tensor& noise) {
  const torch::Tensor idx = torch::full({content.size(0)}, speaker, torch::kLong);
  const torch::Tensor g = SpeakerEmbedding(idx);
  const PriorStats p = prior(content, pitch, g);
  torch::Tensor u = p.mean;
  if (temperature != 0.0) u = u + temperature * torch::exp(0.5 * p.logvar) * noise;
  const torch::Tensor z = flow->inverse(u, g);
  return decoder(z, excitation, g);
}

int AdaptNewSpeaker(Synthesizer& model, const std::string& id, std::uint64_t seed,
                    double sigma) {
  SpeakerRegistry& reg = model->registry();
  if (reg.Contains(id)) throw Error(ErrorCode::kRegistry, "speaker already registered: " + id);
  torch::Tensor& table = model->speaker_table();
  const auto dim = table.size(1);
  std::mt19937_64 rng(seed);
  torch::Tensor row;
  {
    torch::NoGradGuard guard;
    const torch::Tensor noise = NormalTensor(rng, {1, dim}).to(table.dtype());
    if (table.size(0) == 0) {
      row = noise;
    } else {
      row = table.mean(0, true) + sigma * noise;
    }
    table.set_data(torch::cat({table.detach(), row}, 0));
  }
  return reg.Register(id);
}

Matrix PitchFeatures(const F0Contour& f0) {
  const std::size_t n = f0.frames();
  Matrix out(n, 2);
  std::vector<std::size_t> voiced;
  for (std::size_t t = 0; t < n; ++t) {
    if (f0.voiced[t] && f0.f0_hz[t] > 0.0) voiced.push_back(t);
  }
  if (voiced.empty()) {
    for (std::size_t t = 0; t < n; ++t) out(t, 0) = static_cast<float>(kReferenceLogF0);
    return out;
  }
  std::size_t k = 0;  // first voiced index >= t
  for (std::size_t t = 0; t < n; ++t) {
    while (k < voiced.size() && voiced[k] < t) ++k;
    double value;
    if (k < voiced.size() && voiced[k] == t) {
      value = std::log(f0.f0_hz[t]);
      out(t, 1) = 1.0f;
    } else if (k == 0) {
      value = std::log(f0.f0_hz[voiced.front()]);
    } else if (k == voiced.size()) {
      value = std::log(f0.f0_hz[voiced.back()]);
    } else {
      const std::size_t a = voiced[k - 1];
      const std::size_t b = voiced[k];
      const double w = static_cast<double>(t - a) / static_cast<double>(b - a);
      value = (1.0 - w) * std::log(f0.f0_hz[a]) + w * std::log(f0.f0_hz[b]);
    }
    out(t, 0) = static_cast<float>(value);
  }
  return out;
}

std::vector<float> ContourExcitation(const F0Contour& f0, std::size_t num_samples,
                                     const ExcitationConfig& cfg) {
  const std::vector<float> per_sample = UpsampleF0(f0, num_samples, cfg.crossfade);
  return SineExcitation(per_sample, f0.sample_rate, ExcitationParams::From(cfg)).samples;
}

Waveform Convert(Synthesizer& model, const PipelineConfig& cfg, const std::string& target,
                 const F0Contour& shifted_f0, const ContentFeatures& content,
                 std::uint64_t noise_seed) {
  const int speaker = model->registry().Index(target);
  if (content.hop != shifted_f0.hop || content.sample_rate != shifted_f0.sample_rate) {
    throw Error(ErrorCode::kAlignment, "content and f0 use different frame grids");
  }
  const std::size_t cf = content.frames();
  const std::size_t ff = shifted_f0.frames();
  const std::size_t diff = cf > ff ? cf - ff : ff - cf;
  if (diff > static_cast<std::size_t>(cfg.content.align_tolerance)) {
    throw Error(ErrorCode::kAlignment, "content and f0 frame counts differ by " +
                                           std::to_string(diff));
  }
  if (cf == 0) throw Error(ErrorCode::kArgument, "empty content features");
  // The f0 contour is padded by holding its last frame when it is short.
  F0Contour f0 = shifted_f0;
  while (f0.frames() < cf) {
    f0.f0_hz.push_back(f0.f0_hz.empty() ? 0.0 : f0.f0_hz.back());
    f0.voiced.push_back(f0.voiced.empty() ? false : f0.voiced.back());
  }
  f0.Truncate(cf);

  const std::size_t samples = cf * cfg.audio.hop;
  torch::NoGradGuard guard;
  model->eval();
  const torch::Tensor c = MatrixToChannels(content.values).unsqueeze(0);
  const torch::Tensor p = MatrixToChannels(PitchFeatures(f0)).unsqueeze(0);
  const std::vector<float> exc = ContourExcitation(f0, samples, cfg.excitation);
  const torch::Tensor e = VectorToTensor(exc).view({1, 1, -1});
  std::mt19937_64 rng(noise_seed);
  const torch::Tensor noise = NormalTensor(rng, {1, cfg.model.latent_dim, static_cast<long>(cf)});
  const torch::Tensor wave = model->Infer(c, p, e, speaker, cfg.model.temperature, noise);
  Waveform out;
  out.sample_rate = cfg.audio.sample_rate;
  out.samples = TensorToVector(wave);
  return out;
}

}  // namespace singshift
