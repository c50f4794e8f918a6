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

#ifndef SINGSHIFT_AUGMENT_H_
#define SINGSHIFT_AUGMENT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "singshift/audio.h"
#include "singshift/config.h"

namespace singshift {

struct WsolaParams {
  int window = 1024;
  int synthesis_hop = 256;
  int tolerance = 256;

  static WsolaParams From(const AugmentConfig& cfg) {
    return {cfg.window, cfg.synthesis_hop, cfg.tolerance};
  }
};

// Pitch-preserving time-scale modification by waveform-similarity
// overlap-add. speed > 1 plays faster: the output has round(len / speed)
// samples. kArgument unless speed is in [0.5, 2.0].
Waveform TimeStretch(const Waveform& wave, double speed,
                     const WsolaParams& params = {});

// n factors drawn uniformly from [lo, hi] with a seeded generator.
std::vector<double> DrawSpeedFactors(std::size_t n, std::uint64_t seed,
                                     double lo = 0.8, double hi = 1.4);

struct AugmentedClip {
  Waveform wave;
  std::size_t source_index = 0;
  double factor = 1.0;  // 1.0 for the untouched originals
  bool is_copy = false;
};

// Originals followed by one stretched copy per clip: exactly 2x the input.
std::vector<AugmentedClip> AugmentCorpus(const std::vector<Waveform>& clips,
                                         std::uint64_t seed,
                                         const AugmentConfig& cfg = {});

struct AugmentManifestRow {
  std::filesystem::path original;
  std::filesystem::path augmented;
  double factor = 1.0;
  std::uint64_t seed = 0;
};

// Tab-separated with a header: original, augmented, factor, seed.
void WriteAugmentManifest(const std::vector<AugmentManifestRow>& rows,
                          const std::filesystem::path& path);
std::vector<AugmentManifestRow> ReadAugmentManifest(const std::filesystem::path& path);

// Stretches every *.wav in `in_dir` (sorted by name) into `out_dir` as
// <stem>_sp<factor>.wav and writes out_dir/augment_manifest.tsv.
std::vector<AugmentManifestRow> AugmentDirectory(const std::filesystem::path& in_dir,
                                                 const std::filesystem::path& out_dir,
                                                 std::uint64_t seed,
                                                 const AugmentConfig& cfg = {});

// Sorted *.wav files directly inside `dir`.
std::vector<std::filesystem::path> ListWavFiles(const std::filesystem::path& dir);

}  // namespace singshift

#endif  // SINGSHIFT_AUGMENT_H_
