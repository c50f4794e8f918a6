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

#ifndef SINGSHIFT_TENSOR_DSP_H_
#define SINGSHIFT_TENSOR_DSP_H_

#include <torch/torch.h>

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "singshift/config.h"
#include "singshift/matrix.h"

namespace singshift {

// Differentiable counterpart of ComputeMel: same framing, window,
// filterbank, magnitude epsilon and floor. Buffers follow the module dtype.
class MelTransformImpl : public torch::nn::Module {
 public:
  explicit MelTransformImpl(const AudioConfig& cfg);

  // wave: [B, T] or [B, 1, T]. Returns [B, n_mels, ceil(T / hop)].
  torch::Tensor forward(const torch::Tensor& wave);

  // [B, n_fft/2 + 1, frames] magnitudes.
  torch::Tensor Magnitudes(const torch::Tensor& wave);

 private:
  torch::Tensor FrameIndex(std::int64_t len, const torch::Device& device);

  AudioConfig cfg_;
  torch::Tensor filterbank_;  // [n_mels, bins]
  torch::Tensor window_;      // [n_fft]
  std::map<std::int64_t, torch::Tensor> index_cache_;
};
TORCH_MODULE(MelTransform);

// Windowed-sinc low-pass FIR applied with zero-phase "same" padding.
class LowPassImpl : public torch::nn::Module {
 public:
  LowPassImpl(double cutoff_hz, int sample_rate, int taps = 63);

  // x: [B, 1, T].
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::Tensor kernel_;  // [1, 1, taps]
};
TORCH_MODULE(LowPass);

// Anti-aliasing FIR for decimation by `factor`: Blackman-windowed sinc with
// cutoff 0.45 / factor cycles per input sample, 16 * factor + 1 taps, unit
// DC gain. Shape [1, 1, taps].
torch::Tensor DecimationKernel(int factor);

// Filters x ([B, 1, T]) with `kernel` and keeps every factor-th sample;
// output length ceil(T / factor), sample j centred on input j * factor.
torch::Tensor Decimate(const torch::Tensor& x, const torch::Tensor& kernel, int factor);

// Matrix (frames x dims) <-> tensor [dims, frames] conversions.
torch::Tensor MatrixToChannels(const Matrix& m);
Matrix ChannelsToMatrix(const torch::Tensor& t);

torch::Tensor VectorToTensor(std::span<const float> v);
std::vector<float> TensorToVector(const torch::Tensor& t);

}  // namespace singshift

#endif  // SINGSHIFT_TENSOR_DSP_H_
