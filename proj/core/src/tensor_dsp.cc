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

#include "singshift/tensor_dsp.h"

#include <cmath>
#include <numbers>

#include "singshift/error.h"
#include "singshift/mel.h"

namespace singshift {

MelTransformImpl::MelTransformImpl(const AudioConfig& cfg) : cfg_(cfg) {
  const Matrix fb = MelFilterbank(cfg);
  filterbank_ = register_buffer(
      "filterbank",
      torch::from_blob(const_cast<float*>(fb.data().data()),
                       {static_cast<long>(fb.rows()), static_cast<long>(fb.cols())},
                       torch::kFloat)
          .clone());
  std::vector<float> window(cfg.n_fft, 0.0f);
  const auto hann = HannWindow(cfg.win);
  const int offset = (cfg.n_fft - cfg.win) / 2;
  for (int i = 0; i < cfg.win; ++i) window[offset + i] = static_cast<float>(hann[i]);
  window_ = register_buffer("window", VectorToTensor(window));
}

torch::Tensor MelTransformImpl::FrameIndex(std::int64_t len, const torch::Device& device) {
  auto it = index_cache_.find(len);
  if (it != index_cache_.end() && it->second.device() == device) return it->second;
  const std::int64_t frames = static_cast<std::int64_t>(AnalysisFrameCount(len, cfg_.hop));
  const std::int64_t n = cfg_.n_fft;
  std::vector<std::int64_t> idx(frames * n);
  for (std::int64_t t = 0; t < frames; ++t) {
    const std::int64_t start = t * cfg_.hop - n / 2;
    for (std::int64_t i = 0; i < n; ++i) {
      std::int64_t j = start + i;
      if (j < 0) j = -j;
      if (j >= len) j = 2 * (len - 1) - j;
      // Index `len` addresses an appended zero sample.
      idx[t * n + i] = (j >= 0 && j < len) ? j : len;
    }
  }
  torch::Tensor index =
      torch::from_blob(idx.data(), {frames * n}, torch::kLong).clone().to(device);
  index_cache_[len] = index;
  return index;
}

torch::Tensor MelTransformImpl::Magnitudes(const torch::Tensor& wave) {
  torch::Tensor x = wave.dim() == 3 ? wave.squeeze(1) : wave;
  if (x.dim() != 2) throw Error(ErrorCode::kDimension, "mel input must be [B, T]");
  const auto b = x.size(0);
  const auto len = x.size(1);
  const auto frames = static_cast<std::int64_t>(AnalysisFrameCount(len, cfg_.hop));
  const torch::Tensor ext = torch::cat({x, torch::zeros({b, 1}, x.options())}, 1);
  const torch::Tensor framed =
      ext.index_select(1, FrameIndex(len, x.device())).view({b, frames, cfg_.n_fft});
  const torch::Tensor spec = torch::fft::rfft(framed * window_, c10::nullopt, -1);
  const torch::Tensor power = torch::real(spec).square() + torch::imag(spec).square();
  return torch::sqrt(power + kMagnitudeEps).transpose(1, 2);
}

torch::Tensor MelTransformImpl::forward(const torch::Tensor& wave) {
  const torch::Tensor mags = Magnitudes(wave);  // [B, bins, F]
  return torch::log(torch::clamp_min(torch::matmul(filterbank_, mags), kMelFloor));
}

LowPassImpl::LowPassImpl(double cutoff_hz, int sample_rate, int taps) {
  if (taps % 2 == 0) ++taps;
  const double fc = cutoff_hz / sample_rate;
  const int mid = taps / 2;
  std::vector<float> h(taps);
  double sum = 0.0;
  for (int i = 0; i < taps; ++i) {
    const int n = i - mid;
    const double sinc =
        n == 0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * n) / (std::numbers::pi * n);
    const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (taps - 1));
    h[i] = static_cast<float>(sinc * w);
    sum += sinc * w;
  }
  for (float& v : h) v = static_cast<float>(v / sum);
  kernel_ = register_buffer("kernel", VectorToTensor(h).view({1, 1, taps}));
}

torch::Tensor LowPassImpl::forward(const torch::Tensor& x) {
  const auto pad = kernel_.size(2) / 2;
  return torch::conv1d(x, kernel_, {}, 1, pad);
}

torch::Tensor DecimationKernel(int factor) {
  if (factor < 1) throw Error(ErrorCode::kArgument, "decimation factor must be positive");
  const int taps = 16 * factor + 1;
  const int mid = taps / 2;
  const double fc = 0.45 / factor;
  std::vector<double> h(taps);
  double sum = 0.0;
  for (int i = 0; i < taps; ++i) {
    const int n = i - mid;
    const double sinc =
        n == 0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * n) / (std::numbers::pi * n);
    const double a = 2.0 * std::numbers::pi * i / (taps - 1);
    h[i] = sinc * (0.42 - 0.5 * std::cos(a) + 0.08 * std::cos(2.0 * a));
    sum += h[i];
  }
  std::vector<float> k(taps);
  for (int i = 0; i < taps; ++i) k[i] = static_cast<float>(h[i] / sum);
  return VectorToTensor(k).view({1, 1, taps});
}

torch::Tensor Decimate(const torch::Tensor& x, const torch::Tensor& kernel, int factor) {
  if (factor == 1) return x;
  const auto pad = kernel.size(2) / 2;
  return torch::conv1d(x, kernel.to(x.scalar_type()), {}, factor, pad);
}

torch::Tensor MatrixToChannels(const Matrix& m) {
  return torch::from_blob(const_cast<float*>(m.data().data()),
                          {static_cast<long>(m.rows()), static_cast<long>(m.cols())},
                          torch::kFloat)
      .t()
      .clone(at::MemoryFormat::Contiguous);
}

Matrix ChannelsToMatrix(const torch::Tensor& t) {
  const torch::Tensor c = t.detach().to(torch::kFloat).t().contiguous();
  Matrix m(c.size(0), c.size(1));
  std::copy(c.data_ptr<float>(), c.data_ptr<float>() + c.numel(), m.data().begin());
  return m;
}

torch::Tensor VectorToTensor(std::span<const float> v) {
  return torch::from_blob(const_cast<float*>(v.data()), {static_cast<long>(v.size())},
                          torch::kFloat)
      .clone();
}

std::vector<float> TensorToVector(const torch::Tensor& t) {
  const torch::Tensor c = t.detach().to(torch::kFloat).contiguous().view({-1});
  return std::vector<float>(c.data_ptr<float>(), c.data_ptr<float>() + c.numel());
}

}  // namespace singshift
