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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "singshift/error.h"
#include "support/test_util.h"

namespace singshift {
namespace {

using testing::TempDir;

void WriteBytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream os(p, std::ios::binary);
  os.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

void Append32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
}
void Append16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back(v >> 8);
}
void AppendTag(std::vector<std::uint8_t>& b, const char* tag) {
  b.insert(b.end(), tag, tag + 4);
}

// Minimal RIFF writer for formats SaveWav does not produce.
std::vector<std::uint8_t> MakeWav(std::uint16_t format, std::uint16_t channels,
                                  std::uint32_t rate, std::uint16_t bits,
                                  const std::vector<std::uint8_t>& payload,
                                  bool extra_chunk = false) {
  std::vector<std::uint8_t> b;
  AppendTag(b, "RIFF");
  Append32(b, 0);
  AppendTag(b, "WAVE");
  if (extra_chunk) {
    AppendTag(b, "LIST");
    Append32(b, 3);
    b.insert(b.end(), {'a', 'b', 'c', 0});  // odd size plus pad byte
  }
  AppendTag(b, "fmt ");
  Append32(b, 16);
  Append16(b, format);
  Append16(b, channels);
  Append32(b, rate);
  Append32(b, rate * channels * bits / 8);
  Append16(b, channels * bits / 8);
  Append16(b, bits);
  AppendTag(b, "data");
  Append32(b, payload.size());
  b.insert(b.end(), payload.begin(), payload.end());
  const std::uint32_t riff = b.size() - 8;
  std::memcpy(&b[4], &riff, 4);
  return b;
}

TEST(AudioTest, Pcm16RoundTripWithinOneStep) {
  TempDir dir;
  Waveform w;
  w.sample_rate = 24000;
  std::mt19937 rng(3);
  std::uniform_real_distribution<float> u(-0.99f, 0.99f);
  for (int i = 0; i < 1000; ++i) w.samples.push_back(u(rng));
  SaveWav(w, dir / "a.wav");
  const Waveform r = LoadWav(dir / "a.wav");
  ASSERT_EQ(r.size(), w.size());
  EXPECT_EQ(r.sample_rate, 24000);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_NEAR(r.samples[i], w.samples[i], 0.5 / 32768.0 + 1e-7);
  }
}

TEST(AudioTest, SaveClipsOutOfRange) {
  TempDir dir;
  Waveform w;
  w.samples = {2.0f, -2.0f, 1.0f, -1.0f};
  SaveWav(w, dir / "c.wav");
  const Waveform r = LoadWav(dir / "c.wav");
  EXPECT_FLOAT_EQ(r.samples[0], 32767.0f / 32768.0f);
  EXPECT_FLOAT_EQ(r.samples[1], -1.0f);
  EXPECT_FLOAT_EQ(r.samples[2], 32767.0f / 32768.0f);
  EXPECT_FLOAT_EQ(r.samples[3], -1.0f);
}

TEST(AudioTest, Float32StereoIsAveraged) {
  TempDir dir;
  std::vector<std::uint8_t> payload;
  const float frames[][2] = {{0.5f, -0.5f}, {0.25f, 0.75f}};
  for (const auto& f : frames) {
    for (float v : f) {
      std::uint8_t raw[4];
      std::memcpy(raw, &v, 4);
      payload.insert(payload.end(), raw, raw + 4);
    }
  }
  WriteBytes(dir / "f.wav", MakeWav(3, 2, 16000, 32, payload, /*extra_chunk=*/true));
  const Waveform r = LoadWav(dir / "f.wav");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.sample_rate, 16000);
  EXPECT_FLOAT_EQ(r.samples[0], 0.0f);
  EXPECT_FLOAT_EQ(r.samples[1], 0.5f);
}

TEST(AudioTest, RejectsBadInput) {
  TempDir dir;
  WriteBytes(dir / "junk.wav", {'n', 'o', 'p', 'e', 0, 0, 0, 0, 0, 0, 0, 0});
  try {
    LoadWav(dir / "junk.wav");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
  WriteBytes(dir / "pcm24.wav", MakeWav(1, 1, 24000, 24, {0, 0, 0}));
  try {
    LoadWav(dir / "pcm24.wav");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupported);
  }
  try {
    LoadWav(dir / "missing.wav");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(AudioTest, DurationFromHeader) {
  TempDir dir;
  Waveform w;
  w.samples.assign(36000, 0.1f);
  SaveWav(w, dir / "d.wav");
  EXPECT_DOUBLE_EQ(WavDuration(dir / "d.wav"), 1.5);
  EXPECT_DOUBLE_EQ(w.duration(), 1.5);
}

TEST(AudioTest, ValidateRejectsNonFinite) {
  Waveform w;
  w.samples = {0.0f, std::numeric_limits<float>::quiet_NaN()};
  EXPECT_THROW(w.Validate(), Error);
  w.samples = {0.0f};
  w.sample_rate = 0;
  EXPECT_THROW(w.Validate(), Error);
}

TEST(AudioTest, FrameCountMatchesEnumeration) {
  for (std::size_t len : {0u, 5u, 1023u, 1024u, 1025u, 5000u}) {
    for (std::size_t win : {256u, 1024u}) {
      for (std::size_t hop : {64u, 256u}) {
        std::size_t count = 0;
        for (std::size_t start = 0; start + win <= len; start += hop) ++count;
        EXPECT_EQ(FrameCount(len, win, hop), count) << len << " " << win << " " << hop;
      }
    }
  }
}

TEST(AudioTest, FrameSignalViewsAreContiguousSlices) {
  std::vector<float> x(20);
  for (int i = 0; i < 20; ++i) x[i] = static_cast<float>(i);
  const auto frames = FrameSignal(x, 8, 4);
  ASSERT_EQ(frames.size(), 4u);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    ASSERT_EQ(frames[f].size(), 8u);
    EXPECT_EQ(frames[f][0], static_cast<float>(4 * f));
    EXPECT_EQ(frames[f].data(), x.data() + 4 * f);
  }
}

}  // namespace
}  // namespace singshift
