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

#include "singshift/augment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "singshift/error.h"
#include "singshift/mel.h"

namespace singshift {

Waveform TimeStretch(const Waveform& wave, double speed, const WsolaParams& params) {
  if (!(speed >= 0.5 && speed <= 2.0)) {
    throw Error(ErrorCode::kArgument, "speed factor must lie in [0.5, 2.0]");
  }
  const long in_len = static_cast<long>(wave.size());
  const long out_len = std::lround(in_len / speed);
  const int win = params.window;
  const int hop = params.synthesis_hop;
  const int tol = params.tolerance;

  Waveform out;
  out.sample_rate = wave.sample_rate;
  out.samples.assign(out_len, 0.0f);
  if (in_len == 0 || out_len == 0) return out;

  const auto& x = wave.samples;
  auto at = [&](long i) -> double { return (i >= 0 && i < in_len) ? x[i] : 0.0; };
  const auto window = HannWindow(win);

  // Output frames start one window before 0 so the first samples get full
  // overlap coverage.
  const long first = -win / hop;
  const long last = (out_len + hop - 1) / hop;
  std::vector<double> acc(out_len, 0.0), norm(out_len, 0.0);

  long prev = 0;
  bool have_prev = false;
  for (long k = first; k <= last; ++k) {
    const long nominal = std::lround(k * hop * speed);
    long best = nominal;
    if (have_prev && tol > 0) {
      const long natural = prev + hop;
      double best_score = -std::numeric_limits<double>::infinity();
      for (long c = nominal - tol; c <= nominal + tol; ++c) {
        double dot = 0.0, energy = 0.0;
        for (int j = 0; j < win; ++j) {
          const double v = at(c + j);
          dot += at(natural + j) * v;
          energy += v * v;
        }
        const double score = energy > 1e-12 ? dot / std::sqrt(energy) : 0.0;
        if (score > best_score + 1e-12) {
          best_score = score;
          best = c;
        }
      }
    }
    const long dest = k * hop;
    for (int j = 0; j < win; ++j) {
      const long n = dest + j;
      if (n < 0 || n >= out_len) continue;
      acc[n] += window[j] * at(best + j);
      norm[n] += window[j];
    }
    prev = best;
    have_prev = true;
  }
  for (long n = 0; n < out_len; ++n) {
    out.samples[n] = norm[n] > 1e-8 ? static_cast<float>(acc[n] / norm[n]) : 0.0f;
  }
  return out;
}

std::vector<double> DrawSpeedFactors(std::size_t n, std::uint64_t seed, double lo,
                                     double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (auto& f : out) f = std::clamp(dist(rng), lo, hi);
  return out;
}

std::vector<AugmentedClip> AugmentCorpus(const std::vector<Waveform>& clips,
                                         std::uint64_t seed,
                                         const AugmentConfig& cfg) {
  const auto factors = DrawSpeedFactors(clips.size(), seed, cfg.speed_min, cfg.speed_max);
  std::vector<AugmentedClip> out;
  out.reserve(2 * clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    out.push_back({clips[i], i, 1.0, false});
  }
  const auto params = WsolaParams::From(cfg);
  for (std::size_t i = 0; i < clips.size(); ++i) {
    out.push_back({TimeStretch(clips[i], factors[i], params), i, factors[i], true});
  }
  return out;
}

void WriteAugmentManifest(const std::vector<AugmentManifestRow>& rows,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "original\taugmented\tfactor\tseed\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.factor);
    out << r.original.string() << '\t' << r.augmented.string() << '\t' << buf
        << '\t' << r.seed << '\n';
  }
}

std::vector<AugmentManifestRow> ReadAugmentManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<AugmentManifestRow> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string orig, aug, factor, seed;
    std::getline(row, orig, '\t');
    std::getline(row, aug, '\t');
    std::getline(row, factor, '\t');
    std::getline(row, seed, '\t');
    try {
      rows.push_back({orig, aug, std::stod(factor), std::stoull(seed)});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kFormat, path.string() + ": bad manifest row");
    }
  }
  return rows;
}

std::vector<std::filesystem::path> ListWavFiles(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIo, dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<AugmentManifestRow> AugmentDirectory(const std::filesystem::path& in_dir,
                                                 const std::filesystem::path& out_dir,
                                                 std::uint64_t seed,
                                                 const AugmentConfig& cfg) {
  const auto files = ListWavFiles(in_dir);
  if (files.empty()) throw Error(ErrorCode::kIo, "no .wav files in " + in_dir.string());
  std::filesystem::create_directories(out_dir);
  const auto factors = DrawSpeedFactors(files.size(), seed, cfg.speed_min, cfg.speed_max);
  const auto params = WsolaParams::From(cfg);
  std::vector<AugmentManifestRow> rows;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Waveform w = LoadWav(files[i]);
    char tag[32];
    std::snprintf(tag, sizeof(tag), "_sp%.4f", factors[i]);
    const auto dest = out_dir / (files[i].stem().string() + tag + ".wav");
    SaveWav(TimeStretch(w, factors[i], params), dest);
    rows.push_back({files[i], dest, factors[i], seed});
  }
  WriteAugmentManifest(rows, out_dir / "augment_manifest.tsv");
  return rows;
}

}  // namespace singshift
