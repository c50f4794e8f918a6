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

#ifndef SINGSHIFT_CONTENT_H_
#define SINGSHIFT_CONTENT_H_

#include <cstdint>
#include <filesystem>

#include "singshift/matrix.h"
#include "singshift/mel.h"
#include "singshift/pitch.h"

namespace singshift {

enum class ContentSource { kExternal, kToy };

struct ContentFeatures {
  Matrix values;  // frames x content_dim
  int hop = 256;
  int sample_rate = 24000;
  ContentSource source = ContentSource::kExternal;

  std::size_t frames() const { return values.rows(); }
};

// FEAT container: "FEAT", then little-endian u32 version, rows, cols, hop,
// sample_rate, then rows*cols float32 values in row-major order.
inline constexpr std::uint32_t kFeatVersion = 1;

struct FeatureFileHeader {
  char magic[4] = {'F', 'E', 'A', 'T'};
  std::uint32_t version = kFeatVersion;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t hop = 0;
  std::uint32_t sample_rate = 0;
};

void WriteFeatureFile(const Matrix& values, int hop, int sample_rate,
                      const std::filesystem::path& path);

// Raw reader; no dimension check.
Matrix ReadFeatureFile(const std::filesystem::path& path,
                       FeatureFileHeader* header = nullptr);

// Loads external content features and checks cols == content_dim.
ContentFeatures LoadFeatures(const std::filesystem::path& path, int content_dim);

void SaveFeatures(const ContentFeatures& features, const std::filesystem::path& path);

// Offline stand-in for a self-supervised content model: a seeded Gaussian
// projection n_mels -> content_dim, then per-frame standardization. Values
// are clamped to [-10, 10].
ContentFeatures ToyEncode(const MelSpectrogram& mel, int content_dim,
                          std::uint64_t seed);

struct AlignedStreams {
  ContentFeatures content;
  F0Contour f0;
  MelSpectrogram mel;
};

// Truncates all three to the shortest; kAlignment if their frame counts
// differ by more than `tolerance` or their hop/rate disagree.
AlignedStreams AlignStreams(ContentFeatures content, F0Contour f0,
                            MelSpectrogram mel, int tolerance = 3);

}  // namespace singshift

#endif  // SINGSHIFT_CONTENT_H_
