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

#include "singshift/pitch.h"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include "singshift/error.h"
#include "singshift/mel.h"

namespace singshift {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogFloor = 1e-300;

int MinLag(int sample_rate, const PitchConfig& cfg) {
  return std::max(2, static_cast<int>(std::floor(sample_rate / cfg.fmax)));
}

int MaxLag(int sample_rate, const PitchConfig& cfg) {
  return static_cast<int>(std::ceil(sample_rate / cfg.fmin)) + 2;
}

double Cents(double a, double b) { return 1200.0 * std::log2(a / b); }

}  // namespace

std::size_t F0Contour::VoicedCount() const {
  return static_cast<std::size_t>(std::count(voiced.begin(), voiced.end(), true));
}

void F0Contour::Validate() const {
  if (voiced.size() != f0_hz.size()) {
    throw Error(ErrorCode::kArgument, "f0 and voicing lengths differ");
  }
  for (std::size_t i = 0; i < f0_hz.size(); ++i) {
    if (!std::isfinite(f0_hz[i]) || (f0_hz[i] > 0.0) != voiced[i]) {
      throw Error(ErrorCode::kArgument,
                  "f0 must be positive exactly on voiced frames (frame " +
                      std::to_string(i) + ")");
    }
  }
}

void F0Contour::Truncate(std::size_t n) {
  if (n < f0_hz.size()) {
    f0_hz.resize(n);
    voiced.resize(n);
  }
}

F0Contour F0Contour::FromHz(std::vector<double> hz, int hop, int sample_rate) {
  F0Contour c;
  c.hop = hop;
  c.sample_rate = sample_rate;
  c.voiced.resize(hz.size());
  for (std::size_t i = 0; i < hz.size(); ++i) {
    if (hz[i] <= 0.0) hz[i] = 0.0;
    c.voiced[i] = hz[i] > 0.0;
  }
  c.f0_hz = std::move(hz);
  return c;
}

std::vector<double> YinDifference(std::span<const double> frame, int tau_max) {
  if (tau_max < 1 || frame.size() < 2 * static_cast<std::size_t>(tau_max)) {
    throw Error(ErrorCode::kArgument, "frame shorter than 2 * tau_max");
  }
  const std::size_t window = frame.size() / 2;
  std::vector<double> d(tau_max, 0.0);
  for (int tau = 1; tau < tau_max; ++tau) {
    double acc = 0.0;
    for (std::size_t j = 0; j < window; ++j) {
      const double diff = frame[j] - frame[j + tau];
      acc += diff * diff;
    }
    d[tau] = acc;
  }
  return d;
}

std::vector<double> CenteredYinDifference(std::span<const double> frame, int tau_max) {
  if (tau_max < 1 || frame.size() < 2 * static_cast<std::size_t>(tau_max)) {
    throw Error(ErrorCode::kArgument, "frame shorter than 2 * tau_max");
  }
  const std::size_t window = frame.size() / 2;
  std::vector<double> d(tau_max, 0.0);
  for (int tau = 1; tau < tau_max; ++tau) {
    const std::size_t start = (frame.size() - window - tau) / 2;
    double acc = 0.0;
    for (std::size_t j = start; j < start + window; ++j) {
      const double diff = frame[j] - frame[j + tau];
      acc += diff * diff;
    }
    d[tau] = acc;
  }
  return d;
}

std::vector<double> CumulativeMeanNormalized(std::span<const double> diff) {
  std::vector<double> out(diff.size(), 1.0);
  double running = 0.0;
  for (std::size_t tau = 1; tau < diff.size(); ++tau) {
    running += diff[tau];
    out[tau] = running > 0.0 ? diff[tau] * static_cast<double>(tau) / running : 1.0;
  }
  return out;
}

std::vector<double> ThresholdPrior(const PitchConfig& cfg) {
  std::vector<double> mass(cfg.n_thresholds);
  double prev = 0.0;
  for (int k = 1; k <= cfg.n_thresholds; ++k) {
    const double s = static_cast<double>(k) / cfg.n_thresholds;
    const double cdf = boost::math::ibeta(cfg.beta_a, cfg.beta_b, s);
    mass[k - 1] = cdf - prev;
    prev = cdf;
  }
  return mass;
}

std::vector<PitchCandidate> PyinCandidates(std::span<const double> frame,
                                           int sample_rate,
                                           const PitchConfig& cfg) {
  const int tau_min = MinLag(sample_rate, cfg);
  const int tau_max = MaxLag(sample_rate, cfg);
  const auto cmnd = CumulativeMeanNormalized(CenteredYinDifference(frame, tau_max));
  static thread_local std::vector<double> prior;
  static thread_local PitchConfig prior_cfg{};
  if (prior.empty() || prior_cfg.n_thresholds != cfg.n_thresholds ||
      prior_cfg.beta_a != cfg.beta_a || prior_cfg.beta_b != cfg.beta_b) {
    prior = ThresholdPrior(cfg);
    prior_cfg = cfg;
  }

  // Lag -> accumulated mass. Thresholds only ever select local minima, so
  // there are few distinct keys.
  std::map<int, double> mass_by_lag;
  const int last = tau_max - 1;
  for (int k = 0; k < cfg.n_thresholds; ++k) {
    const double threshold = static_cast<double>(k + 1) / cfg.n_thresholds;
    int tau = tau_min;
    while (tau < last && !(cmnd[tau] < threshold)) ++tau;
    if (tau >= last) continue;
    while (tau + 1 < last && cmnd[tau + 1] < cmnd[tau]) ++tau;
    mass_by_lag[tau] += prior[k];
  }

  std::vector<PitchCandidate> out;
  for (const auto& [tau, mass] : mass_by_lag) {
    double lag = tau;
    const double a = cmnd[tau - 1], b = cmnd[tau], c = cmnd[tau + 1];
    const double denom = a - 2.0 * b + c;
    if (denom > 0.0) {
      lag = tau + std::clamp(0.5 * (a - c) / denom, -1.0, 1.0);
    }
    const double hz = sample_rate / lag;
    if (hz < cfg.fmin || hz > cfg.fmax) continue;
    out.push_back({hz, mass});
  }
  return out;
}

PitchHmm::PitchHmm(const PitchConfig& cfg) : cfg_(cfg) {
  bins_ = static_cast<int>(std::floor(Cents(cfg.fmax, cfg.fmin) / cfg.bin_cents)) + 1;
  const int jump = cfg.max_jump_bins;
  const double norm = static_cast<double>(jump + 1) * (jump + 1);
  log_jump_.resize(jump + 1);
  for (int d = 0; d <= jump; ++d) log_jump_[d] = std::log((jump + 1 - d) / norm);
  log_stay_ = std::log(1.0 - cfg.switch_prob);
  log_switch_ = std::log(cfg.switch_prob);
}

double PitchHmm::BinFrequency(int bin) const {
  return cfg_.fmin * std::exp2(bin * cfg_.bin_cents / 1200.0);
}

int PitchHmm::NearestBin(double hz) const {
  const int b = static_cast<int>(std::lround(Cents(hz, cfg_.fmin) / cfg_.bin_cents));
  return std::clamp(b, 0, bins_ - 1);
}

std::vector<double> PitchHmm::Observation(
    const std::vector<PitchCandidate>& cands) const {
  std::vector<double> obs(states(), 0.0);
  double voiced_mass = 0.0;
  for (const auto& c : cands) {
    obs[NearestBin(c.frequency_hz)] += cfg_.yin_trust * c.probability;
    voiced_mass += c.probability;
  }
  const double unvoiced = (1.0 - cfg_.yin_trust * voiced_mass) / bins_;
  for (int b = 0; b < bins_; ++b) obs[bins_ + b] = unvoiced;
  return obs;
}

double PitchHmm::LogTransition(int from, int to) const {
  const int d = std::abs(from % bins_ - to % bins_);
  if (d > cfg_.max_jump_bins) return kNegInf;
  const bool same_class = (from < bins_) == (to < bins_);
  return log_jump_[d] + (same_class ? log_stay_ : log_switch_);
}

double PitchHmm::LogInitial() const { return -std::log(2.0 * bins_); }

std::vector<int> PitchHmm::Decode(
    const std::vector<std::vector<double>>& observations) const {
  const std::size_t frames = observations.size();
  if (frames == 0) return {};
  const int n = states();
  const int jump = cfg_.max_jump_bins;

  std::vector<double> score(n), next(n);
  std::vector<int> back(frames * n, 0);
  for (int s = 0; s < n; ++s) {
    score[s] = LogInitial() + std::log(std::max(observations[0][s], kLogFloor));
  }
  for (std::size_t t = 1; t < frames; ++t) {
    for (int to = 0; to < n; ++to) {
      const int bin = to % bins_;
      const bool to_voiced = to < bins_;
      double best = kNegInf;
      int arg = 0;
      const int lo = std::max(0, bin - jump), hi = std::min(bins_ - 1, bin + jump);
      for (int cls = 0; cls < 2; ++cls) {
        const bool from_voiced = cls == 0;
        const double sw = from_voiced == to_voiced ? log_stay_ : log_switch_;
        const int base = from_voiced ? 0 : bins_;
        for (int b = lo; b <= hi; ++b) {
          const double v = score[base + b] + log_jump_[std::abs(b - bin)] + sw;
          if (v > best) {
            best = v;
            arg = base + b;
          }
        }
      }
      next[to] = best + std::log(std::max(observations[t][to], kLogFloor));
      back[t * n + to] = arg;
    }
    std::swap(score, next);
  }
  std::vector<int> path(frames);
  path[frames - 1] =
      static_cast<int>(std::max_element(score.begin(), score.end()) - score.begin());
  for (std::size_t t = frames - 1; t > 0; --t) {
    path[t - 1] = back[t * n + path[t]];
  }
  return path;
}

double PitchHmm::PathLogScore(const std::vector<std::vector<double>>& observations,
                              std::span<const int> path) const {
  if (path.empty()) return 0.0;
  double s = LogInitial() + std::log(std::max(observations[0][path[0]], kLogFloor));
  for (std::size_t t = 1; t < path.size(); ++t) {
    s += LogTransition(path[t - 1], path[t]) +
         std::log(std::max(observations[t][path[t]], kLogFloor));
  }
  return s;
}

F0Contour PyinViterbi(const PitchCandidateSet& cands, const PitchConfig& cfg,
                      int hop, int sample_rate) {
  F0Contour contour;
  contour.hop = hop;
  contour.sample_rate = sample_rate;
  if (cands.empty()) return contour;

  const PitchHmm hmm(cfg);
  std::vector<std::vector<double>> obs;
  obs.reserve(cands.size());
  for (const auto& frame : cands) obs.push_back(hmm.Observation(frame));
  const auto path = hmm.Decode(obs);

  contour.f0_hz.assign(cands.size(), 0.0);
  contour.voiced.assign(cands.size(), false);
  for (std::size_t t = 0; t < cands.size(); ++t) {
    if (path[t] >= hmm.bins()) continue;
    const double center = hmm.BinFrequency(path[t]);
    double hz = center;
    double best = cfg.bin_cents;
    for (const auto& c : cands[t]) {
      const double dist = std::abs(Cents(c.frequency_hz, center));
      if (dist <= best) {
        best = dist;
        hz = c.frequency_hz;
      }
    }
    contour.f0_hz[t] = hz;
    contour.voiced[t] = true;
  }
  return contour;
}

PitchCandidateSet AnalyzeCandidates(const Waveform& wave, const PitchConfig& cfg,
                                    int hop) {
  const std::size_t frames = AnalysisFrameCount(wave.size(), hop);
  PitchCandidateSet out(frames);
  std::vector<double> frame(cfg.frame_length);
  for (std::size_t t = 0; t < frames; ++t) {
    CenteredFrame(wave.samples, static_cast<long>(t) * hop, frame);
    out[t] = PyinCandidates(frame, wave.sample_rate, cfg);
  }
  return out;
}

F0Contour EstimateF0(const Waveform& wave, const PitchConfig& pitch, int hop) {
  return PyinViterbi(AnalyzeCandidates(wave, pitch, hop), pitch, hop,
                     wave.sample_rate);
}

double MeanVoicedF0(const F0Contour& contour) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < contour.frames(); ++i) {
    if (contour.voiced[i]) {
      sum += contour.f0_hz[i];
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

void WriteF0Text(const F0Contour& contour, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "frame\tf0_hz\tvoiced\n";
  char buf[64];
  for (std::size_t i = 0; i < contour.frames(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6f", contour.f0_hz[i]);
    out << i << '\t' << buf << '\t' << (contour.voiced[i] ? 1 : 0) << '\n';
  }
}

}  // namespace singshift
