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

#include "singshift/config.h"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "singshift/error.h"

namespace singshift {

namespace {

struct Field {
  std::string section;
  std::string key;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void Bad(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::kConfig, "bad value '" + value + "' for " + key);
}

long long ParseInt(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) Bad(key, v);
  return out;
}

double ParseDouble(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) Bad(key, v);
    return d;
  } catch (const std::logic_error&) {
    Bad(key, v);
  }
}

bool ParseBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  Bad(key, v);
}

std::vector<int> ParseIntList(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& item : Split(v, ',')) {
    out.push_back(static_cast<int>(ParseInt(key, item)));
  }
  return out;
}

// Shortest text that parses back to the same double.
std::string FormatDouble(double d) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, res.ptr);
}

std::string FormatIntList(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

template <typename Member>
Field IntField(std::string section, std::string key, Member member) {
  const std::string name = section + "." + key;
  return {section, key,
          [=](PipelineConfig& c, const std::string& v) {
            std::invoke(member, c) =
                static_cast<std::remove_reference_t<decltype(std::invoke(member, c))>>(
                    ParseInt(name, v));
          },
          [=](const PipelineConfig& c) {
            return std::to_string(std::invoke(member, c));
          }};
}

template <typename Member>
Field DoubleField(std::string section, std::string key, Member member) {
  const std::string name = section + "." + key;
  return {section, key,
          [=](PipelineConfig& c, const std::string& v) {
            std::invoke(member, c) = ParseDouble(name, v);
          },
          [=](const PipelineConfig& c) {
            return FormatDouble(std::invoke(member, c));
          }};
}

template <typename Member>
Field BoolField(std::string section, std::string key, Member member) {
  const std::string name = section + "." + key;
  return {section, key,
          [=](PipelineConfig& c, const std::string& v) {
            std::invoke(member, c) = ParseBool(name, v);
          },
          [=](const PipelineConfig& c) {
            return std::string(std::invoke(member, c) ? "true" : "false");
          }};
}

template <typename Member>
Field StringField(std::string section, std::string key, Member member) {
  return {section, key,
          [=](PipelineConfig& c, const std::string& v) {
            std::invoke(member, c) = v;
          },
          [=](const PipelineConfig& c) { return std::invoke(member, c); }};
}

template <typename Member>
Field IntListField(std::string section, std::string key, Member member) {
  const std::string name = section + "." + key;
  return {section, key,
          [=](PipelineConfig& c, const std::string& v) {
            std::invoke(member, c) = ParseIntList(name, v);
          },
          [=](const PipelineConfig& c) {
            return FormatIntList(std::invoke(member, c));
          }};
}

// Accessor helpers so the table can reach nested members.
#define SS_MEMBER(path) [](auto& c) -> auto& { return c.path; }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(IntField("audio", "sample_rate", SS_MEMBER(audio.sample_rate)));
    f.push_back(IntField("audio", "n_fft", SS_MEMBER(audio.n_fft)));
    f.push_back(IntField("audio", "win", SS_MEMBER(audio.win)));
    f.push_back(IntField("audio", "hop", SS_MEMBER(audio.hop)));
    f.push_back(IntField("audio", "n_mels", SS_MEMBER(audio.n_mels)));
    f.push_back(DoubleField("audio", "fmin", SS_MEMBER(audio.fmin)));
    f.push_back(DoubleField("audio", "fmax", SS_MEMBER(audio.fmax)));

    f.push_back(DoubleField("pitch", "fmin", SS_MEMBER(pitch.fmin)));
    f.push_back(DoubleField("pitch", "fmax", SS_MEMBER(pitch.fmax)));
    f.push_back(IntField("pitch", "frame_length", SS_MEMBER(pitch.frame_length)));
    f.push_back(IntField("pitch", "n_thresholds", SS_MEMBER(pitch.n_thresholds)));
    f.push_back(DoubleField("pitch", "beta_a", SS_MEMBER(pitch.beta_a)));
    f.push_back(DoubleField("pitch", "beta_b", SS_MEMBER(pitch.beta_b)));
    f.push_back(DoubleField("pitch", "bin_cents", SS_MEMBER(pitch.bin_cents)));
    f.push_back(IntField("pitch", "max_jump_bins", SS_MEMBER(pitch.max_jump_bins)));
    f.push_back(DoubleField("pitch", "switch_prob", SS_MEMBER(pitch.switch_prob)));
    f.push_back(DoubleField("pitch", "yin_trust", SS_MEMBER(pitch.yin_trust)));

    f.push_back(DoubleField("excitation", "amplitude", SS_MEMBER(excitation.amplitude)));
    f.push_back(DoubleField("excitation", "sigma", SS_MEMBER(excitation.sigma)));
    f.push_back(IntField("excitation", "harmonics", SS_MEMBER(excitation.harmonics)));
    f.push_back(IntField("excitation", "crossfade", SS_MEMBER(excitation.crossfade)));
    f.push_back(IntField("excitation", "seed", SS_MEMBER(excitation.seed)));

    f.push_back(IntField("content", "dim", SS_MEMBER(content.dim)));
    f.push_back(StringField("content", "source", SS_MEMBER(content.source)));
    f.push_back(IntField("content", "toy_seed", SS_MEMBER(content.toy_seed)));
    f.push_back(IntField("content", "align_tolerance", SS_MEMBER(content.align_tolerance)));

    f.push_back(StringField("model", "preset", SS_MEMBER(model.preset)));
    f.push_back(IntField("model", "latent_dim", SS_MEMBER(model.latent_dim)));
    f.push_back(IntField("model", "hidden", SS_MEMBER(model.hidden)));
    f.push_back(IntField("model", "filter", SS_MEMBER(model.filter)));
    f.push_back(IntField("model", "heads", SS_MEMBER(model.heads)));
    f.push_back(IntField("model", "transformer_layers", SS_MEMBER(model.transformer_layers)));
    f.push_back(IntField("model", "attention_window", SS_MEMBER(model.attention_window)));
    f.push_back(IntField("model", "posterior_layers", SS_MEMBER(model.posterior_layers)));
    f.push_back(IntField("model", "posterior_kernel", SS_MEMBER(model.posterior_kernel)));
    f.push_back(IntField("model", "flow_couplings", SS_MEMBER(model.flow_couplings)));
    f.push_back(IntField("model", "flow_layers", SS_MEMBER(model.flow_layers)));
    f.push_back(IntField("model", "flow_kernel", SS_MEMBER(model.flow_kernel)));
    f.push_back(BoolField("model", "flow_speaker", SS_MEMBER(model.flow_speaker)));
    f.push_back(IntField("model", "speaker_dim", SS_MEMBER(model.speaker_dim)));
    f.push_back(IntListField("model", "upsample_rates", SS_MEMBER(model.upsample_rates)));
    f.push_back(IntField("model", "upsample_channels", SS_MEMBER(model.upsample_channels)));
    f.push_back(IntListField("model", "resblock_kernels", SS_MEMBER(model.resblock_kernels)));
    f.push_back(Field{
        "model", "resblock_dilations",
        [](PipelineConfig& c, const std::string& v) {
          c.model.resblock_dilations.clear();
          for (const auto& group : Split(v, ';')) {
            c.model.resblock_dilations.push_back(
                ParseIntList("model.resblock_dilations", group));
          }
        },
        [](const PipelineConfig& c) {
          std::string out;
          for (std::size_t i = 0; i < c.model.resblock_dilations.size(); ++i) {
            if (i) out += ";";
            out += FormatIntList(c.model.resblock_dilations[i]);
          }
          return out;
        }});
    f.push_back(Field{
        "model", "inject_stages",
        [](PipelineConfig& c, const std::string& v) {
          c.model.inject_stages.clear();
          if (v != "all") {
            c.model.inject_stages = ParseIntList("model.inject_stages", v);
          }
        },
        [](const PipelineConfig& c) {
          return c.model.inject_stages.empty()
                     ? std::string("all")
                     : FormatIntList(c.model.inject_stages);
        }});
    f.push_back(DoubleField("model", "temperature", SS_MEMBER(model.temperature)));
    f.push_back(IntListField("model", "mpd_periods", SS_MEMBER(model.mpd_periods)));
    f.push_back(IntListField("model", "mpd_channels", SS_MEMBER(model.mpd_channels)));
    f.push_back(IntListField("model", "msd_channels", SS_MEMBER(model.msd_channels)));

    f.push_back(IntField("training", "batch_size", SS_MEMBER(training.batch_size)));
    f.push_back(DoubleField("training", "learning_rate", SS_MEMBER(training.learning_rate)));
    f.push_back(DoubleField("training", "beta1", SS_MEMBER(training.beta1)));
    f.push_back(DoubleField("training", "beta2", SS_MEMBER(training.beta2)));
    f.push_back(DoubleField("training", "adam_eps", SS_MEMBER(training.adam_eps)));
    f.push_back(DoubleField("training", "lr_decay", SS_MEMBER(training.lr_decay)));
    f.push_back(IntField("training", "segment_frames", SS_MEMBER(training.segment_frames)));
    f.push_back(IntField("training", "checkpoint_every", SS_MEMBER(training.checkpoint_every)));
    f.push_back(IntField("training", "seed", SS_MEMBER(training.seed)));
    f.push_back(DoubleField("training", "mel_weight", SS_MEMBER(training.mel_weight)));
    f.push_back(DoubleField("training", "kl_weight", SS_MEMBER(training.kl_weight)));
    f.push_back(DoubleField("training", "adv_weight", SS_MEMBER(training.adv_weight)));
    f.push_back(DoubleField("training", "fm_weight", SS_MEMBER(training.fm_weight)));
    f.push_back(IntField("training", "steps_pretrain_speech", SS_MEMBER(training.steps_pretrain_speech)));
    f.push_back(IntField("training", "steps_pretrain_singing", SS_MEMBER(training.steps_pretrain_singing)));
    f.push_back(IntField("training", "steps_adapt", SS_MEMBER(training.steps_adapt)));
    f.push_back(DoubleField("training", "new_speaker_sigma", SS_MEMBER(training.new_speaker_sigma)));

    f.push_back(StringField("keyshift", "mode", SS_MEMBER(keyshift.mode)));

    f.push_back(DoubleField("augment", "speed_min", SS_MEMBER(augment.speed_min)));
    f.push_back(DoubleField("augment", "speed_max", SS_MEMBER(augment.speed_max)));
    f.push_back(IntField("augment", "window", SS_MEMBER(augment.window)));
    f.push_back(IntField("augment", "synthesis_hop", SS_MEMBER(augment.synthesis_hop)));
    f.push_back(IntField("augment", "tolerance", SS_MEMBER(augment.tolerance)));

    f.push_back(BoolField("postproc", "enabled", SS_MEMBER(postproc.enabled)));
    f.push_back(IntField("postproc", "dsp_harmonics", SS_MEMBER(postproc.dsp_harmonics)));
    f.push_back(DoubleField("postproc", "anchor_weight", SS_MEMBER(postproc.anchor_weight)));
    f.push_back(DoubleField("postproc", "anchor_cutoff_hz", SS_MEMBER(postproc.anchor_cutoff_hz)));
    f.push_back(DoubleField("postproc", "peak", SS_MEMBER(postproc.peak)));
    f.push_back(DoubleField("postproc", "silence_threshold", SS_MEMBER(postproc.silence_threshold)));
    f.push_back(IntField("postproc", "noise_seed", SS_MEMBER(postproc.noise_seed)));
    f.push_back(IntField("postproc", "refiner_steps", SS_MEMBER(postproc.refiner_steps)));
    f.push_back(IntField("postproc", "refiner_channels", SS_MEMBER(postproc.refiner_channels)));
    return f;
  }();
  return fields;
}

#undef SS_MEMBER

const std::set<std::string>& HashedSections() {
  static const std::set<std::string> s = {"audio", "pitch", "excitation",
                                          "content", "model"};
  return s;
}

void Require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kConfig, message);
}

}  // namespace

PipelineConfig PipelineConfig::Toy() { return PipelineConfig{}; }

PipelineConfig PipelineConfig::Full() {
  PipelineConfig c;
  c.model.preset = "full";
  c.model.latent_dim = 192;
  c.model.hidden = 192;
  c.model.filter = 768;
  c.model.heads = 2;
  c.model.transformer_layers = 6;
  c.model.posterior_layers = 6;
  c.model.flow_layers = 4;
  c.model.speaker_dim = 256;
  c.model.upsample_rates = {8, 8, 2, 2};
  c.model.upsample_channels = 512;
  c.model.resblock_kernels = {3, 7, 11};
  c.model.resblock_dilations = {{1, 3, 5}, {1, 3, 5}, {1, 3, 5}};
  c.model.mpd_channels = {32, 128, 512, 1024};
  c.model.msd_channels = {16, 64, 256, 1024};
  c.training.batch_size = 16;
  c.training.learning_rate = 1e-4;
  c.training.steps_pretrain_speech = 600000;
  c.training.steps_pretrain_singing = 300000;
  c.training.steps_adapt = 100000;
  c.training.checkpoint_every = 10000;
  c.postproc.refiner_channels = 512;
  c.postproc.refiner_steps = 100000;
  return c;
}

int PipelineConfig::UpsampleProduct() const {
  return std::accumulate(model.upsample_rates.begin(), model.upsample_rates.end(),
                         1, std::multiplies<>());
}

void PipelineConfig::Validate() const {
  Require(schema_version == kConfigSchemaVersion, "unsupported schema_version");
  const auto& a = audio;
  Require(a.sample_rate == 16000 || a.sample_rate == 24000 ||
              a.sample_rate == 44100,
          "audio.sample_rate must be 16000, 24000 or 44100");
  Require(a.hop > 0 && a.win > 0 && a.n_fft > 0, "audio sizes must be positive");
  Require(a.hop <= a.win, "audio.hop must not exceed audio.win");
  Require(a.win <= a.n_fft, "audio.win must not exceed audio.n_fft");
  Require(a.n_mels > 0, "audio.n_mels must be positive");
  Require(a.fmin >= 0 && a.fmin < a.fmax, "audio.fmin must be below audio.fmax");
  Require(a.fmax <= a.sample_rate / 2.0, "audio.fmax exceeds Nyquist");

  const auto& p = pitch;
  Require(p.fmin > 0 && p.fmin < p.fmax, "pitch band must satisfy 0 < fmin < fmax");
  Require(p.fmax < a.sample_rate / 2.0, "pitch.fmax must be below Nyquist");
  Require(p.fmin > static_cast<double>(a.sample_rate) / p.frame_length,
          "pitch.fmin too low for pitch.frame_length");
  const int tau_max = static_cast<int>(std::ceil(a.sample_rate / p.fmin)) + 2;
  Require(p.frame_length >= 2 * tau_max,
          "pitch.frame_length must cover two periods of pitch.fmin");
  Require(p.n_thresholds > 0, "pitch.n_thresholds must be positive");
  Require(p.bin_cents > 0 && p.max_jump_bins >= 0, "bad pitch HMM grid");
  Require(p.switch_prob > 0 && p.switch_prob < 1, "pitch.switch_prob in (0,1)");
  Require(p.yin_trust > 0 && p.yin_trust <= 1, "pitch.yin_trust in (0,1]");

  Require(excitation.harmonics >= 1, "excitation.harmonics >= 1");
  Require(excitation.amplitude >= 0 && excitation.sigma >= 0,
          "excitation amplitude and sigma must be nonnegative");
  Require(excitation.crossfade >= 0 && excitation.crossfade <= a.hop,
          "excitation.crossfade must lie in [0, hop]");

  Require(content.dim > 0, "content.dim must be positive");
  Require(content.source == "toy" || content.source == "external",
          "content.source must be toy or external");
  Require(content.align_tolerance >= 0, "content.align_tolerance >= 0");

  const auto& m = model;
  Require(m.preset == "toy" || m.preset == "full", "model.preset toy|full");
  Require(m.latent_dim >= 2 && m.latent_dim % 2 == 0,
          "model.latent_dim must be even (coupling split)");
  Require(m.hidden > 0 && m.heads > 0 && m.hidden % m.heads == 0,
          "model.hidden must be divisible by model.heads");
  Require(m.transformer_layers > 0 && m.posterior_layers > 0 &&
              m.flow_couplings > 0 && m.flow_layers > 0,
          "layer counts must be positive");
  Require(m.posterior_kernel % 2 == 1 && m.flow_kernel % 2 == 1,
          "WaveNet kernels must be odd");
  Require(!m.upsample_rates.empty(), "model.upsample_rates empty");
  for (int r : m.upsample_rates) Require(r >= 2 && r % 2 == 0, "upsample rates must be even");
  Require(UpsampleProduct() == a.hop, "product of model.upsample_rates must equal audio.hop");
  Require(m.upsample_channels >> m.upsample_rates.size() >= 1,
          "model.upsample_channels too small for the number of stages");
  Require(m.resblock_kernels.size() == m.resblock_dilations.size(),
          "resblock kernels and dilations must pair up");
  for (int s : m.inject_stages) {
    Require(s >= 0 && s < static_cast<int>(m.upsample_rates.size()),
            "model.inject_stages index out of range");
  }
  Require(m.temperature >= 0, "model.temperature >= 0");
  Require(!m.mpd_periods.empty() && !m.mpd_channels.empty() &&
              !m.msd_channels.empty(),
          "discriminator lists must be non-empty");

  const auto& t = training;
  Require(t.batch_size > 0, "training.batch_size > 0");
  Require(t.learning_rate > 0, "training.learning_rate > 0");
  Require(t.beta1 >= 0 && t.beta1 < 1 && t.beta2 >= 0 && t.beta2 < 1, "bad Adam betas");
  Require(t.lr_decay > 0 && t.lr_decay <= 1, "training.lr_decay in (0,1]");
  Require(t.segment_frames > 0, "training.segment_frames > 0");
  Require(t.checkpoint_every > 0, "training.checkpoint_every > 0");
  Require(t.steps_pretrain_speech > 0 && t.steps_pretrain_singing > 0 &&
              t.steps_adapt > 0,
          "stage steps must be positive");

  Require(keyshift.mode == "linear" || keyshift.mode == "semitone",
          "keyshift.mode linear|semitone");

  const auto& g = augment;
  Require(g.speed_min >= 0.5 && g.speed_min <= g.speed_max && g.speed_max <= 2.0,
          "augment speed range must lie in [0.5, 2.0]");
  Require(g.window > 0 && g.synthesis_hop > 0 && g.synthesis_hop <= g.window &&
              g.tolerance >= 0,
          "bad WSOLA sizes");

  const auto& q = postproc;
  Require(q.dsp_harmonics >= 1, "postproc.dsp_harmonics >= 1");
  Require(q.anchor_cutoff_hz > 0 && q.anchor_cutoff_hz < a.sample_rate / 2.0,
          "postproc.anchor_cutoff_hz must be below Nyquist");
  Require(q.peak > 0 && q.peak <= 1, "postproc.peak in (0,1]");
  Require(q.refiner_steps > 0, "postproc.refiner_steps > 0");
  Require(q.refiner_channels >> m.upsample_rates.size() >= 1,
          "postproc.refiner_channels too small");
}

std::string PipelineConfig::ToIni() const {
  std::ostringstream out;
  out << "[meta]\nschema_version = " << schema_version << "\n";
  std::string section;
  for (const auto& f : Fields()) {
    if (f.section != section) {
      section = f.section;
      out << "\n[" << section << "]\n";
    }
    out << f.key << " = " << f.get(*this) << "\n";
  }
  if (!keyshift.fallback.empty()) {
    out << "\n[fallback]\n";
    for (const auto& [speaker, surrogate] : keyshift.fallback) {
      out << speaker << " = " << surrogate << "\n";
    }
  }
  return out.str();
}

std::string PipelineConfig::ModelHash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  };
  for (const auto& f : Fields()) {
    if (!HashedSections().count(f.section)) continue;
    mix(f.section);
    mix(".");
    mix(f.key);
    mix("=");
    mix(f.get(*this));
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PipelineConfig ParseConfig(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::kFormat, std::string("config: ") + e.what());
  }

  const auto meta = tree.get_child_optional("meta");
  if (!meta || !meta->get_optional<std::string>("schema_version")) {
    throw Error(ErrorCode::kConfig, "missing [meta] schema_version");
  }
  const long long version =
      ParseInt("meta.schema_version", Trim(meta->get<std::string>("schema_version")));
  if (version != kConfigSchemaVersion) {
    throw Error(ErrorCode::kConfig,
                "schema_version " + std::to_string(version) + " is not supported");
  }

  std::string preset = "toy";
  if (auto m = tree.get_child_optional("model")) {
    if (auto p = m->get_optional<std::string>("preset")) preset = Trim(*p);
  }
  PipelineConfig cfg;
  if (preset == "full") {
    cfg = PipelineConfig::Full();
  } else if (preset != "toy") {
    Bad("model.preset", preset);
  }

  for (const auto& [section, body] : tree) {
    if (section == "meta") {
      for (const auto& [key, value] : body) {
        if (key != "schema_version") {
          throw Error(ErrorCode::kConfig, "unknown key meta." + key);
        }
      }
      continue;
    }
    if (section == "fallback") {
      for (const auto& [key, value] : body) {
        cfg.keyshift.fallback[key] = Trim(value.data());
      }
      continue;
    }
    for (const auto& [key, value] : body) {
      const auto& fields = Fields();
      auto it = std::find_if(fields.begin(), fields.end(), [&](const Field& f) {
        return f.section == section && f.key == key;
      });
      if (it == fields.end()) {
        throw Error(ErrorCode::kConfig, "unknown key " + section + "." + key);
      }
      it->set(cfg, Trim(value.data()));
    }
  }
  cfg.Validate();
  return cfg;
}

PipelineConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

void SaveConfig(const PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write config " + path.string());
  out << cfg.ToIni();
}

}  // namespace singshift
