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

#ifndef SINGSHIFT_AUDIO_H_
#define SINGSHIFT_AUDIO_H_

#include <filesystem>
#include <span>
#include <vector>

namespace singshift {

// Mono audio at a fixed sample rate. Samples are nominally in [-1, 1].
struct Waveform {
  std::vector<float> samples;
  int sample_rate = 24000;

  std::size_t size() const { return samples.size(); }
  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }

  // Throws kArgument on non-finite samples or a nonpositive rate.
  void Validate() const;
};

// Reads a little-endian RIFF/WAVE file. Accepts 16-bit PCM and 32-bit IEEE
// float, mono or stereo (downmixed by averaging). int16 samples are divided
// by 32768.
Waveform LoadWav(const std::filesystem::path& path);

// Writes 16-bit PCM mono. Samples are clipped to [-1, 1] first.
void SaveWav(const Waveform& wave, const std::filesystem::path& path);

// Reads only the header and returns the duration in seconds.
double WavDuration(const std::filesystem::path& path);

// Number of complete frames: 1 + (len - win) / hop when len >= win, else 0.
std::size_t FrameCount(std::size_t len, std::size_t win, std::size_t hop);

// Views into `signal`, one per complete frame. No padding.
std::vector<std::span<const float>> FrameSignal(std::span<const float> signal,
                                                std::size_t win,
                                                std::size_t hop);

}  // namespace singshift

#endif  // SINGSHIFT_AUDIO_H_
