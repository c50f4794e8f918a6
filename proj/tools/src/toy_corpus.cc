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

#include "singshift/toy_corpus.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "singshift/error.h"
#include "singshift/manifest.h"

namespace singshift {

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t SampleCount(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

void ScalePeak(Waveform& w, double peak) {
  float m = 0.0f;
  for (float v : w.samples) m = std::max(m, std::abs(v));
  if (m <= 0.0f) return;
  const float g = static_cast<float>(peak / m);
  for (float& v : w.samples) v *= g;
}

double Resonance(double f, const std::vector<double>& formants) {
  double g = 0.3;
  for (double fc : formants) {
    const double bw = 0.1 * fc + 60.0;
    g += std::exp(-(f - fc) * (f - fc) / (2.0 * bw * bw));
  }
  return g;
}

// Harmonic amplitudes for a voice at f0 up to 0.9 * Nyquist.
std::vector<double> HarmonicGains(double f0, const std::vector<double>& formants,
                                  int sample_rate) {
  std::vector<double> gains;
  for (int h = 1; h * f0 < 0.45 * sample_rate; ++h) {
    gains.push_back(Resonance(h * f0, formants) / h);
  }
  return gains;
}

}  // namespace

Waveform Sawtooth(double f0, double seconds, int sample_rate, double amplitude) {
  return SawtoothGlide(f0, f0, seconds, sample_rate, amplitude);
}

Waveform SawtoothGlide(double f_start, double f_end, double seconds, int sample_rate,
                       double amplitude) {
  Waveform w;
  w.sample_rate = sample_rate;
  const std::size_t n = SampleCount(seconds, sample_rate);
  w.samples.resize(n);
  const double ratio = std::log(f_end / f_start);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double frac = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
    const double f = f_start * std::exp(ratio * frac);
    double s = 0.0;
    for (int h = 1; h * f < 0.5 * sample_rate; ++h) s += std::sin(h * phase) / h;
    w.samples[i] = static_cast<float>(amplitude * (2.0 / std::numbers::pi) * s);
    phase = std::fmod(phase + kTwoPi * f / sample_rate, kTwoPi);
  }
  return w;
}

Waveform HarmonicTone(double f0, double seconds, int sample_rate, int harmonics,
                      double amplitude) {
  Waveform w;
  w.sample_rate = sample_rate;
  const std::size_t n = SampleCount(seconds, sample_rate);
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    double s = 0.0;
    for (int h = 1; h <= harmonics && h * f0 < 0.5 * sample_rate; ++h) {
      s += std::sin(kTwoPi * h * f0 * t);
    }
    w.samples[i] = static_cast<float>(s);
  }
  ScalePeak(w, amplitude);
  return w;
}

Waveform Silence(double seconds, int sample_rate) {
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(SampleCount(seconds, sample_rate), 0.0f);
  return w;
}

Waveform SingingClip(const ToyVoice& voice, double seconds, int sample_rate, std::uint64_t seed) {
  static constexpr std::array<int, 6> kScale = {0, 2, 4, 5, 7, 9};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Waveform w;
  w.sample_rate = sample_rate;
  const std::size_t n = SampleCount(seconds, sample_rate);
  w.samples.assign(n, 0.0f);

  const int notes = std::max(1, static_cast<int>(std::lround(seconds / 0.5)));
  const std::size_t note_len = n / notes;
  const std::size_t gap = SampleCount(0.04, sample_rate);
  const std::size_t attack = SampleCount(0.03, sample_rate);
  std::vector<double> phases;
  for (int k = 0; k < notes; ++k) {
    const int semi = kScale[std::uniform_int_distribution<int>(0, kScale.size() - 1)(rng)];
    const double f_note = voice.base_f0 * std::pow(2.0, semi / 12.0);
    const std::vector<double> gains = HarmonicGains(f_note * 1.03, voice.formants_hz, sample_rate);
    phases.assign(gains.size(), 0.0);
    const std::size_t begin = k * note_len;
    const std::size_t end = (k == notes - 1) ? n : begin + note_len;
    const std::size_t voiced_end = end > begin + gap ? end - gap : begin;
    for (std::size_t i = begin; i < voiced_end; ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      const double f = f_note * (1.0 + 0.02 * std::sin(kTwoPi * 5.5 * t));
      const std::size_t local = i - begin;
      const std::size_t to_end = voiced_end - i;
      double env = 1.0;
      if (local < attack) env = static_cast<double>(local) / attack;
      if (to_end < attack) env = std::min(env, static_cast<double>(to_end) / attack);
      double s = 0.0;
      for (std::size_t h = 0; h < gains.size(); ++h) {
        s += gains[h] * std::sin(phases[h]);
        phases[h] = std::fmod(phases[h] + kTwoPi * (h + 1) * f / sample_rate, kTwoPi);
      }
      w.samples[i] = static_cast<float>(env * s);
    }
  }
  ScalePeak(w, 0.5);
  for (float& v : w.samples) v += static_cast<float>(voice.breath * noise(rng));
  return w;
}

Waveform SpeechClip(const ToyVoice& voice, double seconds, int sample_rate, std::uint64_t seed) {
  static const std::array<std::array<double, 3>, 5> kVowels = {{{730.0, 1090.0, 2440.0},
                                                                {270.0, 2290.0, 3010.0},
                                                                {530.0, 1840.0, 2480.0},
                                                                {570.0, 840.0, 2410.0},
                                                                {300.0, 870.0, 2240.0}}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Waveform w;
  w.sample_rate = sample_rate;
  const std::size_t n = SampleCount(seconds, sample_rate);
  w.samples.assign(n, 0.0f);
  const double formant_scale =
      voice.formants_hz.empty() ? 1.0 : voice.formants_hz.front() / 700.0;

  const std::size_t syl = SampleCount(0.25, sample_rate);
  const std::size_t ramp = SampleCount(0.02, sample_rate);
  std::vector<double> phases;
  double prev = 0.0;
  for (std::size_t begin = 0; begin < n; begin += syl) {
    const std::size_t end = std::min(n, begin + syl);
    const auto& v = kVowels[std::uniform_int_distribution<int>(0, kVowels.size() - 1)(rng)];
    std::vector<double> formants;
    for (double f : v) formants.push_back(f * formant_scale);
    const double t0 = static_cast<double>(begin) / n;
    const double f_syl = voice.base_f0 * (1.15 - 0.3 * t0);
    const std::vector<double> gains = HarmonicGains(f_syl * 1.1, formants, sample_rate);
    phases.assign(gains.size(), 0.0);
    const std::size_t voiced_end = begin + (end - begin) * 65 / 100;
    const std::size_t burst_end = begin + (end - begin) * 85 / 100;
    for (std::size_t i = begin; i < end; ++i) {
      double s = 0.0;
      if (i < voiced_end) {
        const double tau = static_cast<double>(i - begin) / (voiced_end - begin);
        const double f = f_syl * (1.0 + 0.06 * std::sin(std::numbers::pi * tau));
        double env = 1.0;
        if (i - begin < ramp) env = static_cast<double>(i - begin) / ramp;
        if (voiced_end - i < ramp) env = std::min(env, static_cast<double>(voiced_end - i) / ramp);
        for (std::size_t h = 0; h < gains.size(); ++h) {
          s += env * gains[h] * std::sin(phases[h]);
          phases[h] = std::fmod(phases[h] + kTwoPi * (h + 1) * f / sample_rate, kTwoPi);
        }
      } else if (i < burst_end) {
        const double g = noise(rng);
        s = 0.15 * (g - prev);
        prev = g;
      }
      w.samples[i] = static_cast<float>(s);
    }
  }
  ScalePeak(w, 0.5);
  for (float& x : w.samples) x += static_cast<float>(voice.breath * noise(rng));
  return w;
}

ToyCorpusLayout WriteToyCorpus(const fs::path& out_dir, const ToyCorpusOptions& options) {
  fs::create_directories(out_dir / "wav");
  ToyCorpusLayout layout;
  layout.voices = {
      {"spk_m", SourceKind::kSpeech, 120.0, {650.0, 1100.0, 2500.0}, 0.005},
      {"spk_f", SourceKind::kSpeech, 210.0, {800.0, 1350.0, 2900.0}, 0.005},
      {"sing_a", SourceKind::kSinging, 196.0, {600.0, 1000.0, 2500.0}, 0.004},
      {"sing_b", SourceKind::kSinging, 262.0, {750.0, 1250.0, 2800.0}, 0.004},
      {"sing_c", SourceKind::kSinging, 147.0, {550.0, 950.0, 2400.0}, 0.004},
      {"target", SourceKind::kSinging, 330.0, {850.0, 1500.0, 3100.0}, 0.004},
  };
  const int pool_clips[] = {4, 3, 2};
  layout.target_speaker = "target";
  layout.heldout_speaker = "sing_a";

  std::uint64_t clip_seed = options.seed * 1000003ull;
  auto write = [&](const ToyVoice& v, int index, const std::string& split) {
    const Waveform w = v.kind == SourceKind::kSpeech
                           ? SpeechClip(v, options.clip_seconds, options.sample_rate, ++clip_seed)
                           : SingingClip(v, options.clip_seconds, options.sample_rate, ++clip_seed);
    char name[96];
    std::snprintf(name, sizeof(name), "%s_%s_%02d.wav", v.id.c_str(), split.c_str(), index);
    const fs::path path = out_dir / "wav" / name;
    SaveWav(w, path);
    ManifestEntry e;
    e.wav = fs::path("wav") / name;
    e.speaker = v.id;
    e.split = split;
    e.duration_s = w.duration();
    return e;
  };

  CorpusManifest speech, singing, target;
  for (int s = 0; s < 2; ++s) {
    for (int i = 0; i < options.speech_clips; ++i) {
      speech.entries.push_back(write(layout.voices[s], i, "train"));
    }
  }
  for (int s = 0; s < 3; ++s) {
    for (int i = 0; i < pool_clips[s]; ++i) {
      singing.entries.push_back(write(layout.voices[2 + s], i, "train"));
    }
  }
  for (int i = 0; i < options.target_clips; ++i) {
    target.entries.push_back(write(layout.voices[5], i, "train"));
  }
  const ManifestEntry held = write(layout.voices[2], 0, "test");

  layout.speech_manifest = out_dir / "speech.tsv";
  layout.singing_manifest = out_dir / "singing.tsv";
  layout.target_manifest = out_dir / "target.tsv";
  layout.postproc_manifest = out_dir / "postproc.tsv";
  layout.heldout_wav = out_dir / held.wav;
  CorpusManifest all_singing = singing;
  all_singing.entries.insert(all_singing.entries.end(), target.entries.begin(),
                             target.entries.end());
  WriteManifest(speech, layout.speech_manifest);
  WriteManifest(singing, layout.singing_manifest);
  WriteManifest(target, layout.target_manifest);
  WriteManifest(all_singing, layout.postproc_manifest);
  return layout;
}

}  // namespace singshift
