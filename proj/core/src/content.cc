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

#include "singshift/content.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "singshift/error.h"

namespace singshift {

void WriteFeatureFile(const Matrix& values, int hop, int sample_rate,
                      const std::filesystem::path& path) {
  FeatureFileHeader h;
  h.rows = static_cast<std::uint32_t>(values.rows());
  h.cols = static_cast<std::uint32_t>(values.cols());
  h.hop = static_cast<std::uint32_t>(hop);
  h.sample_rate = static_cast<std::uint32_t>(sample_rate);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(h.magic, 4);
  for (std::uint32_t v : {h.version, h.rows, h.cols, h.hop, h.sample_rate}) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  out.write(reinterpret_cast<const char*>(values.data().data()),
            static_cast<std::streamsize>(values.data().size() * sizeof(float)));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

Matrix ReadFeatureFile(const std::filesystem::path& path, FeatureFileHeader* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  FeatureFileHeader h;
  in.read(h.magic, 4);
  std::uint32_t fields[5] = {};
  in.read(reinterpret_cast<char*>(fields), sizeof(fields));
  if (!in) throw Error(ErrorCode::kFormat, path.string() + ": short FEAT header");
  if (std::memcmp(h.magic, "FEAT", 4) != 0) {
    throw Error(ErrorCode::kFormat, path.string() + ": bad FEAT magic");
  }
  h.version = fields[0];
  h.rows = fields[1];
  h.cols = fields[2];
  h.hop = fields[3];
  h.sample_rate = fields[4];
  if (h.version != kFeatVersion) {
    throw Error(ErrorCode::kFormat,
                path.string() + ": FEAT version " + std::to_string(h.version));
  }
  Matrix m(h.rows, h.cols);
  const std::size_t bytes = m.data().size() * sizeof(float);
  in.read(reinterpret_cast<char*>(m.data().data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) {
    throw Error(ErrorCode::kCorruption, path.string() + ": truncated FEAT payload");
  }
  if (header) *header = h;
  return m;
}

ContentFeatures LoadFeatures(const std::filesystem::path& path, int content_dim) {
  FeatureFileHeader h;
  ContentFeatures f;
  f.values = ReadFeatureFile(path, &h);
  if (h.rows > 0 && static_cast<int>(h.cols) != content_dim) {
    throw Error(ErrorCode::kDimension,
                path.string() + ": " + std::to_string(h.cols) +
                    " columns, expected " + std::to_string(content_dim));
  }
  for (float v : f.values.data()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kCorruption, path.string() + ": non-finite feature");
    }
  }
  f.hop = static_cast<int>(h.hop);
  f.sample_rate = static_cast<int>(h.sample_rate);
  f.source = ContentSource::kExternal;
  return f;
}

void SaveFeatures(const ContentFeatures& features, const std::filesystem::path& path) {
  WriteFeatureFile(features.values, features.hop, features.sample_rate, path);
}

ContentFeatures ToyEncode(const MelSpectrogram& mel, int content_dim,
                          std::uint64_t seed) {
  const std::size_t n_mels = mel.values.cols();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(std::max<std::size_t>(n_mels, 1)));
  std::vector<double> proj(n_mels * content_dim);
  for (auto& w : proj) w = gauss(rng);

  ContentFeatures out;
  out.hop = mel.hop;
  out.sample_rate = mel.sample_rate;
  out.source = ContentSource::kToy;
  out.values = Matrix(mel.frames(), content_dim);
  std::vector<double> y(content_dim);
  for (std::size_t t = 0; t < mel.frames(); ++t) {
    const auto x = mel.values.row(t);
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t m = 0; m < n_mels; ++m) {
      const double xm = x[m];
      const double* w = proj.data() + m * content_dim;
      for (int c = 0; c < content_dim; ++c) y[c] += xm * w[c];
    }
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= content_dim;
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= content_dim;
    const double inv = var > 1e-12 ? 1.0 / std::sqrt(var) : 0.0;
    for (int c = 0; c < content_dim; ++c) {
      out.values(t, c) = static_cast<float>(std::clamp((y[c] - mean) * inv, -10.0, 10.0));
    }
  }
  return out;
}

AlignedStreams AlignStreams(ContentFeatures content, F0Contour f0,
                            MelSpectrogram mel, int tolerance) {
  if (content.hop != f0.hop || content.hop != mel.hop ||
      content.sample_rate != f0.sample_rate ||
      content.sample_rate != mel.sample_rate) {
    throw Error(ErrorCode::kAlignment, "streams disagree on hop or sample rate");
  }
  const std::size_t lo = std::min({content.frames(), f0.frames(), mel.frames()});
  const std::size_t hi = std::max({content.frames(), f0.frames(), mel.frames()});
  if (hi - lo > static_cast<std::size_t>(tolerance)) {
    throw Error(ErrorCode::kAlignment,
                "frame counts (content " + std::to_string(content.frames()) +
                    ", f0 " + std::to_string(f0.frames()) + ", mel " +
                    std::to_string(mel.frames()) + ") differ by more than " +
                    std::to_string(tolerance));
  }
  content.values.TruncateRows(lo);
  f0.Truncate(lo);
  mel.values.TruncateRows(lo);
  return {std::move(content), std::move(f0), std::move(mel)};
}

}  // namespace singshift
