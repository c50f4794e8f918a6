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

#include "singshift/audio.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "singshift/error.h"

namespace singshift {

namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct WavInfo {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  std::size_t data_offset = 0;
  std::size_t data_bytes = 0;
};

template <typename T>
T ReadLe(const std::vector<char>& buf, std::size_t offset) {
  T v;
  std::memcpy(&v, buf.data() + offset, sizeof(T));
  return v;
}

std::vector<char> ReadFile(const std::filesystem::path& path,
                           std::size_t max_bytes = SIZE_MAX) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<char> buf;
  if (max_bytes == SIZE_MAX) {
    buf.assign(std::istreambuf_iterator<char>(in), {});
  } else {
    buf.resize(max_bytes);
    in.read(buf.data(), static_cast<std::streamsize>(max_bytes));
    buf.resize(static_cast<std::size_t>(in.gcount()));
  }
  return buf;
}

// Walks the RIFF chunk list. When `header_only` the data chunk may be cut.
WavInfo ParseHeader(const std::vector<char>& buf, const std::string& name,
                    bool header_only) {
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kFormat, name + ": not a RIFF/WAVE file");
  }
  WavInfo info;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t size = ReadLe<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (size < 16 || body + size > buf.size()) {
        throw Error(ErrorCode::kFormat, name + ": short fmt chunk");
      }
      info.format = ReadLe<std::uint16_t>(buf, body);
      info.channels = ReadLe<std::uint16_t>(buf, body + 2);
      info.sample_rate = ReadLe<std::uint32_t>(buf, body + 4);
      info.bits = ReadLe<std::uint16_t>(buf, body + 14);
      if (info.format == kFormatExtensible && size >= 26) {
        info.format = ReadLe<std::uint16_t>(buf, body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      if (!have_fmt) throw Error(ErrorCode::kFormat, name + ": data before fmt");
      info.data_offset = body;
      info.data_bytes = size;
      if (!header_only && body + size > buf.size()) {
        throw Error(ErrorCode::kFormat, name + ": truncated data chunk");
      }
      return info;
    }
    pos = body + size + (size & 1u);
  }
  throw Error(ErrorCode::kFormat, name + ": missing fmt or data chunk");
}

void CheckEncoding(const WavInfo& info, const std::string& name) {
  const bool pcm16 = info.format == kFormatPcm && info.bits == 16;
  const bool float32 = info.format == kFormatFloat && info.bits == 32;
  if (!pcm16 && !float32) {
    throw Error(ErrorCode::kUnsupported,
                name + ": only 16-bit PCM and 32-bit float are supported");
  }
  if (info.channels != 1 && info.channels != 2) {
    throw Error(ErrorCode::kUnsupported, name + ": only mono or stereo");
  }
  if (info.sample_rate == 0) {
    throw Error(ErrorCode::kFormat, name + ": zero sample rate");
  }
}

void PutLe32(std::string& out, std::uint32_t v) {
  out.append(reinterpret_cast<const char*>(&v), 4);
}
void PutLe16(std::string& out, std::uint16_t v) {
  out.append(reinterpret_cast<const char*>(&v), 2);
}

}  // namespace

void Waveform::Validate() const {
  if (sample_rate <= 0) throw Error(ErrorCode::kArgument, "sample rate <= 0");
  for (float s : samples) {
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::kArgument, "waveform holds non-finite samples");
    }
  }
}

Waveform LoadWav(const std::filesystem::path& path) {
  const std::string name = path.string();
  const std::vector<char> buf = ReadFile(path);
  const WavInfo info = ParseHeader(buf, name, false);
  CheckEncoding(info, name);

  const std::size_t bytes_per_sample = info.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * info.channels;
  const std::size_t frames = info.data_bytes / frame_bytes;

  Waveform wave;
  wave.sample_rate = static_cast<int>(info.sample_rate);
  wave.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t ch = 0; ch < info.channels; ++ch) {
      const std::size_t at =
          info.data_offset + i * frame_bytes + ch * bytes_per_sample;
      if (info.format == kFormatPcm) {
        acc += ReadLe<std::int16_t>(buf, at) / 32768.0;
      } else {
        acc += ReadLe<float>(buf, at);
      }
    }
    wave.samples[i] = static_cast<float>(acc / info.channels);
  }
  return wave;
}

double WavDuration(const std::filesystem::path& path) {
  const std::vector<char> buf = ReadFile(path, 4096);
  const WavInfo info = ParseHeader(buf, path.string(), true);
  CheckEncoding(info, path.string());
  const std::size_t frames = info.data_bytes / (info.bits / 8 * info.channels);
  return static_cast<double>(frames) / info.sample_rate;
}

void SaveWav(const Waveform& wave, const std::filesystem::path& path) {
  wave.Validate();
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(wave.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out.append("RIFF");
  PutLe32(out, 36 + data_bytes);
  out.append("WAVEfmt ");
  PutLe32(out, 16);
  PutLe16(out, kFormatPcm);
  PutLe16(out, 1);
  PutLe32(out, static_cast<std::uint32_t>(wave.sample_rate));
  PutLe32(out, static_cast<std::uint32_t>(wave.sample_rate) * 2);
  PutLe16(out, 2);
  PutLe16(out, 16);
  out.append("data");
  PutLe32(out, data_bytes);
  for (float s : wave.samples) {
    const double clipped = std::clamp(static_cast<double>(s), -1.0, 1.0);
    const long q = std::lround(clipped * 32768.0);
    PutLe16(out, static_cast<std::uint16_t>(
                     static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L))));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::size_t FrameCount(std::size_t len, std::size_t win, std::size_t hop) {
  if (win == 0 || hop == 0 || len < win) return 0;
  return 1 + (len - win) / hop;
}

std::vector<std::span<const float>> FrameSignal(std::span<const float> signal,
                                                std::size_t win,
                                                std::size_t hop) {
  const std::size_t n = FrameCount(signal.size(), win, hop);
  std::vector<std::span<const float>> frames;
  frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    frames.push_back(signal.subspan(i * hop, win));
  }
  return frames;
}

}  // namespace singshift
